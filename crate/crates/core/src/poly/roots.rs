use std::f64::consts::PI;

use super::{Complexd, PolyError, Polynomial};

/// Absolute tolerance below which two root approximations are the same point.
pub const CLUSTER_TOL: f64 = 1e-8;

// Approximations of a k-fold root scatter by roughly eps^(1/k); groups closer
// than this are candidates for a multiple root and are confirmed by a Taylor test.
const COARSE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_sweeps: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { max_sweeps: 200 }
    }
}

/// All `d` roots of `p`, with multiplicity, using default options.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complexd>, PolyError> {
    poly_roots_with(p, RootOptions::default())
}

/// Aberth–Ehrlich simultaneous iteration.
///
/// Exact zero roots are split off first; the rest start on the circle of
/// radius `1 + max|a_k / a_d|` at angles `2 pi k / d + 0.4`.
pub fn poly_roots_with(p: &Polynomial, opts: RootOptions) -> Result<Vec<Complexd>, PolyError> {
    let deg = p.degree();
    match deg {
        None | Some(0) => return Err(PolyError::DegreeTooLow(deg)),
        _ => {}
    }
    if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(PolyError::NonFinite);
    }

    let zeros_at_origin = p
        .coeffs()
        .iter()
        .take_while(|c| **c == Complexd::new(0.0, 0.0))
        .count();
    let lead = p.leading();
    let monic = Polynomial::new(p.coeffs()[zeros_at_origin..].iter().map(|c| c / lead).collect());
    let mut roots = vec![Complexd::new(0.0, 0.0); zeros_at_origin];
    let n = monic.degree().unwrap_or(0);
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-monic.coeffs()[0]);
        return Ok(roots);
    }

    let radius = 1.0
        + monic.coeffs()[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complexd> = (0..n)
        .map(|k| Complexd::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    let resid_tol = 4.0 * (n as f64 + 1.0) * f64::EPSILON;

    for _ in 0..opts.max_sweeps {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (pv, dpv) = monic.eval_with_derivative(z[i]);
            if pv.norm() <= resid_tol * monic.eval_scale(z[i]) {
                done[i] = true;
                continue;
            }
            let newton = pv / dpv;
            let repulsion: Complexd = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = newton / (Complexd::new(1.0, 0.0) - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Coincident approximations; nudge off the collision.
                let bump = Complexd::new(1e-6, 1e-6) * z[i].norm().max(1.0);
                z[i] += bump;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 2.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }

    // Multiple roots stall before every correction drops to rounding level;
    // accept any set whose backward error is small.
    let worst = z
        .iter()
        .map(|&r| monic.eval(r).norm() / monic.eval_scale(r).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if !(worst <= 1e-10) {
        return Err(PolyError::NonConvergence {
            sweeps: opts.max_sweeps,
            residual: worst,
        });
    }
    roots.extend(z);
    Ok(roots)
}

/// Groups root approximations into `(centre, multiplicity)` clusters.
///
/// Nearby approximations are merged when the Taylor coefficients of `p` at
/// their centroid vanish to the order of the group size; otherwise they are
/// grouped at the fine tolerance [`CLUSTER_TOL`].
pub fn cluster_roots(p: &Polynomial, roots: &[Complexd]) -> Vec<(Complexd, usize)> {
    let coarse = single_linkage(roots, |a, b| (a - b).norm() <= COARSE_TOL * (1.0 + a.norm()));
    let mut out = Vec::new();
    for group in coarse {
        if group.len() == 1 {
            out.push((roots[group[0]], 1));
            continue;
        }
        let members: Vec<Complexd> = group.iter().map(|&i| roots[i]).collect();
        let centre = polish_multiple(p, centroid(&members), members.len());
        if vanishes_to_order(p, centre, members.len()) {
            out.push((centre, members.len()));
            continue;
        }
        for sub in single_linkage(&members, |a, b| (a - b).norm() <= CLUSTER_TOL) {
            let pts: Vec<Complexd> = sub.iter().map(|&i| members[i]).collect();
            out.push((centroid(&pts), pts.len()));
        }
    }
    out
}

/// Newton on `p^(k-1)`, for which a k-fold root of `p` is simple.
fn polish_multiple(p: &Polynomial, mut c: Complexd, k: usize) -> Complexd {
    let mut q = p.clone();
    for _ in 1..k {
        q = q.derivative();
    }
    for _ in 0..8 {
        let (v, dv) = q.eval_with_derivative(c);
        let step = v / dv;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        c -= step;
        if step.norm() <= 4.0 * f64::EPSILON * c.norm().max(1.0) {
            break;
        }
    }
    c
}

fn centroid(pts: &[Complexd]) -> Complexd {
    pts.iter().sum::<Complexd>() / pts.len() as f64
}

/// True when `p^(j)(c)/j!` is negligible for every `j < k`.
fn vanishes_to_order(p: &Polynomial, c: Complexd, k: usize) -> bool {
    let mut q = p.clone();
    let mut factorial = 1.0;
    for j in 0..k {
        if j > 0 {
            q = q.derivative();
            factorial *= j as f64;
        }
        let val = q.eval(c).norm() / factorial;
        let scale = q.eval_scale(c) / factorial;
        let tol = if j == 0 { 1e-12 } else { 1e-5 };
        if val > tol * scale.max(f64::MIN_POSITIVE) {
            return false;
        }
    }
    true
}

fn single_linkage(
    pts: &[Complexd],
    close: impl Fn(Complexd, Complexd) -> bool,
) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if close(pts[i], pts[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; pts.len()];
    for i in 0..pts.len() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}
