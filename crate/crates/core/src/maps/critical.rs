//! Critical points of `T`, bucketed by where they come from.
//!
//! Differentiating `T = N - delta p(N)/p'` gives
//! `T' = p'' F / p'^(d+2)` with `F = p p'^d - delta p Q + delta P`, where
//! `P / p'^d = p(N)` and `Q / p'^(d-1) = p'(N)`. Roots of `p` divide `F`
//! (twice when `delta = 1`); zeros of `p''` are inflection critical points;
//! zeros of `p'` are poles whose order comes from the normal form; the rest of
//! `F`, plus infinity when it is critical, is free.

use super::{MapError, TraubMap};
use crate::poly::{cluster_roots, poly_roots, rational_compose, Complexd, Polynomial, RationalMap};
use crate::sphere::SpherePoint;

const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    /// Roots of `p` with their multiplicity as critical points of `T`.
    pub at_roots: Vec<(Complexd, usize)>,
    /// Zeros of `p'` (poles of `T`) with critical multiplicity `order - 1`.
    pub at_poles: Vec<(Complexd, usize)>,
    /// Zeros of `p''` that are not zeros of `p'`, with multiplicity.
    pub at_inflections: Vec<(Complexd, usize)>,
    /// Remaining critical points, repeated by multiplicity; may contain infinity.
    pub free: Vec<SpherePoint>,
    /// Some zero of `p'` is multiple; pole multiplicities then come from the
    /// pole order rather than the simple-zero rule.
    pub non_simple_derivative_zeros: bool,
    /// Degree of `T` as a map of the sphere.
    pub map_degree: usize,
}

impl CriticalSet {
    pub fn total_multiplicity(&self) -> usize {
        let sum = |v: &[(Complexd, usize)]| v.iter().map(|e| e.1).sum::<usize>();
        sum(&self.at_roots) + sum(&self.at_poles) + sum(&self.at_inflections) + self.free.len()
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }
}

/// Requires simple roots and `delta != 0`.
pub fn critical_set(m: &TraubMap) -> Result<CriticalSet, MapError> {
    if m.roots().iter().any(|&(_, k)| k > 1) {
        return Err(MapError::HypothesisViolated("polynomial has a multiple root"));
    }
    if m.delta() == Complexd::new(0.0, 0.0) {
        return Err(MapError::HypothesisViolated("damping parameter is zero"));
    }
    let p = m.poly();
    let dp = m.derivative();
    let ddp = dp.derivative();
    let d = m.degree();
    let delta = m.delta();

    let newton = RationalMap::new(&(&Polynomial::z() * dp) - p, dp.clone());
    let p_of_n = rational_compose(p, &newton).num;
    let dp_of_n = rational_compose(dp, &newton).num;
    let f = &(&(p * &dp.pow(d as u32)) - &(p * &dp_of_n).scale(delta)) + &p_of_n.scale(delta);
    let mut g = f.trimmed(1e-9);

    let mut root_mult = 0;
    while g.degree().unwrap_or(0) >= d
        && m.roots().iter().all(|&(a, _)| g.eval(a).norm() <= 1e-8 * g.eval_scale(a))
    {
        g = g.div_rem(p).0;
        root_mult += 1;
    }
    let mut at_roots: Vec<(Complexd, usize)> = m.roots().iter().map(|&(a, _)| (a, root_mult)).collect();

    let dp_zeros = zeros(dp)?;
    let non_simple = dp_zeros.iter().any(|&(_, k)| k > 1);
    let at_poles: Vec<(Complexd, usize)> = dp_zeros.iter().map(|&(b, k)| (b, (d + 1) * k - 1)).collect();

    let mut at_inflections: Vec<(Complexd, usize)> = Vec::new();
    for (gamma, k) in zeros(&ddp)? {
        if near_any(gamma, &dp_zeros).is_some() {
            continue;
        }
        if let Some(i) = near_any(gamma, &at_roots) {
            at_roots[i].1 += k;
        } else {
            at_inflections.push((gamma, k));
        }
    }

    let mut free = Vec::new();
    for (z, k) in zeros(&g)? {
        if let Some(i) = near_any(z, &at_roots) {
            at_roots[i].1 += k;
        } else if let Some(i) = near_any(z, &at_inflections) {
            at_inflections[i].1 += k;
        } else if near_any(z, &dp_zeros).is_some() {
            // F does not vanish at poles; a zero here would be spurious
            continue;
        } else {
            free.extend(std::iter::repeat_n(SpherePoint::Finite(z), k));
        }
    }

    let (infinity_mult, map_degree) = infinity_multiplicity(m);
    free.extend(std::iter::repeat_n(SpherePoint::Infinity, infinity_mult));

    Ok(CriticalSet {
        at_roots,
        at_poles,
        at_inflections,
        free,
        non_simple_derivative_zeros: non_simple,
        map_degree,
    })
}

fn zeros(q: &Polynomial) -> Result<Vec<(Complexd, usize)>, MapError> {
    if q.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let approx = poly_roots(q)?;
    Ok(cluster_roots(q, &approx))
}

fn near_any(z: Complexd, set: &[(Complexd, usize)]) -> Option<usize> {
    set.iter().position(|&(w, _)| (z - w).norm() <= MATCH_TOL * (1.0 + w.norm()))
}

/// Critical multiplicity at infinity (local degree minus one) and the
/// degree of the map, both read from the normal form.
fn infinity_multiplicity(m: &TraubMap) -> (usize, usize) {
    let nf = m.normal_form();
    let num = nf.num.trimmed(1e-9);
    let den = &nf.den;
    let dn = num.degree().unwrap_or(0);
    let dd = den.degree().unwrap_or(0);
    let local = if dn != dd {
        dn.abs_diff(dd)
    } else {
        let ratio = num.leading() / den.leading();
        let rest = (&num - &den.scale(ratio)).trimmed(1e-9);
        dd - rest.degree().unwrap_or(0)
    };
    (local.saturating_sub(1), dn.max(dd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::degenerate_parameter;

    fn c(re: f64, im: f64) -> Complexd {
        Complexd::new(re, im)
    }

    fn unity(n: usize) -> Polynomial {
        Polynomial::monomial_minus(n, c(1.0, 0.0))
    }

    fn set_for(p: Polynomial, delta: f64) -> CriticalSet {
        critical_set(&TraubMap::new(p, c(delta, 0.0)).unwrap()).unwrap()
    }

    #[test]
    fn cubic_counts() {
        let s = set_for(unity(3), 0.5);
        assert_eq!(s.free_count(), 6);
        assert!(s.at_roots.iter().all(|&(_, k)| k == 1));
        assert_eq!(s.at_poles, vec![(c(0.0, 0.0), 7)]);
        assert!(s.non_simple_derivative_zeros);
        assert_eq!(s.total_multiplicity(), 2 * s.map_degree - 2);

        let s = set_for(unity(3), 1.0);
        assert_eq!(s.free_count(), 3);
        assert!(s.at_roots.iter().all(|&(_, k)| k == 2));
        assert_eq!(s.total_multiplicity(), 2 * s.map_degree - 2);

        let s = set_for(unity(3), degenerate_parameter(3));
        assert_eq!(s.free_count(), 4);
        assert_eq!(s.free.iter().filter(|z| z.is_infinite()).count(), 1);
        assert_eq!(s.map_degree, 8);
        assert_eq!(s.total_multiplicity(), 2 * s.map_degree - 2);
    }

    #[test]
    fn quartic_and_generic_counts() {
        for (delta, free) in [(0.5, 12), (1.0, 8), (degenerate_parameter(4), 10)] {
            let s = set_for(unity(4), delta);
            assert_eq!(s.free_count(), free, "delta {delta}");
            assert_eq!(s.total_multiplicity(), 2 * s.map_degree - 2);
        }
        let p = Polynomial::from_roots(&[c(0.0, 0.5), c(0.0, -0.5), c(0.439, 0.0)]);
        for (delta, free) in [(0.3, 6), (1.0, 3), (degenerate_parameter(3), 4)] {
            let s = set_for(p.clone(), delta);
            assert_eq!(s.free_count(), free, "delta {delta}");
            assert!(!s.non_simple_derivative_zeros);
            assert!(s.at_poles.iter().all(|&(_, k)| k == 3));
            assert_eq!(s.at_inflections.len(), 1);
            assert_eq!(s.total_multiplicity(), 2 * s.map_degree - 2);
        }
    }

    #[test]
    fn free_points_are_critical() {
        let m = TraubMap::new(unity(3), c(0.5, 0.0)).unwrap();
        let s = critical_set(&m).unwrap();
        for z in s.free.iter().filter_map(|z| z.finite()) {
            let z3 = z.powu(3);
            let deriv = z3.powu(3) * 50.0 - z3.powu(2) * 69.0 + z3 * 15.0 + 4.0;
            assert!(deriv.norm() < 1e-9 * z3.powu(3).norm().max(1.0), "{z}");
        }
    }

    #[test]
    fn hypotheses_enforced() {
        let m = TraubMap::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)], c(0.5, 0.0)).unwrap();
        assert!(matches!(critical_set(&m), Err(MapError::HypothesisViolated(_))));
        let m = TraubMap::new(unity(3), c(0.0, 0.0)).unwrap();
        assert!(matches!(critical_set(&m), Err(MapError::HypothesisViolated(_))));
    }
}
