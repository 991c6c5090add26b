//! The damped Traub family `T(z) = N(z) - delta * p(N(z)) / p'(z)` with
//! `N(z) = z - p(z)/p'(z)`, evaluated on the Riemann sphere.

mod critical;
mod gdelta;
mod special;

use crate::poly::{
    cluster_roots, poly_roots, rational_compose, Complexd, PolyError, Polynomial, RationalMap,
};
use crate::sphere::SpherePoint;

pub use critical::{critical_set, CriticalSet};
pub use gdelta::{gdelta_critical_points, gdelta_eval, gdelta_eval_c, quadratic_conjugacy};
pub use special::{
    cubic_critical_points, monomial_normal_form, special_form, ClosedForm, CubicCriticalPoints,
};

/// Beyond this modulus points are evaluated in the chart `w = 1/z`.
pub const CHART_RADIUS: f64 = 1e8;

/// `|p'/p|` below this fraction of `sum k_i / |z - a_i|` is treated as a pole.
pub const POLE_EPS: f64 = 1e-13;

/// Relative tolerance for the degenerate parameter and for indifference.
const CLASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("polynomial must have degree >= 2")]
    DegreeTooLow,
    #[error(transparent)]
    Roots(#[from] PolyError),
    #[error("map is indeterminate at {0}")]
    Indeterminate(Complexd),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointKind {
    Superattracting,
    Attracting,
    Repelling,
    Indifferent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointClass {
    pub kind: FixedPointKind,
    pub multiplier: Complexd,
}

impl FixedPointClass {
    pub fn from_multiplier(multiplier: Complexd) -> Self {
        let m = multiplier.norm();
        let kind = if m <= CLASS_TOL {
            FixedPointKind::Superattracting
        } else if (m - 1.0).abs() <= CLASS_TOL {
            FixedPointKind::Indifferent
        } else if m < 1.0 {
            FixedPointKind::Attracting
        } else {
            FixedPointKind::Repelling
        };
        Self { kind, multiplier }
    }

    pub fn is_attracting(&self) -> bool {
        matches!(
            self.kind,
            FixedPointKind::Superattracting | FixedPointKind::Attracting
        )
    }
}

/// Behaviour of the map at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfinityClass {
    Fixed(FixedPointClass),
    /// The degenerate parameter `delta = d^d / (d-1)^(d-1)`, where infinity
    /// maps to a finite point.
    NotFixed,
}

impl InfinityClass {
    pub fn is_attracting(&self) -> bool {
        matches!(self, InfinityClass::Fixed(c) if c.is_attracting())
    }
}

/// A polynomial bound to a damping parameter, with its roots cached.
#[derive(Debug, Clone)]
pub struct TraubMap {
    p: Polynomial,
    dp: Polynomial,
    delta: Complexd,
    roots: Vec<(Complexd, usize)>,
    normal: RationalMap,
    chart: RationalMap,
}

impl TraubMap {
    /// Binds `p` (degree >= 2) and locates its roots.
    pub fn new(p: Polynomial, delta: Complexd) -> Result<Self, MapError> {
        if p.degree().unwrap_or(0) < 2 {
            return Err(MapError::DegreeTooLow);
        }
        let approx = poly_roots(&p)?;
        let roots = cluster_roots(&p, &approx);
        Ok(Self::assemble(p, delta, roots))
    }

    /// Builds `prod (z - r)` from the given roots; repeated entries are
    /// multiple roots and are kept exact.
    pub fn from_roots(roots: &[Complexd], delta: Complexd) -> Result<Self, MapError> {
        if roots.len() < 2 {
            return Err(MapError::DegreeTooLow);
        }
        let mut grouped: Vec<(Complexd, usize)> = Vec::new();
        for &r in roots {
            match grouped.iter_mut().find(|(g, _)| *g == r) {
                Some(entry) => entry.1 += 1,
                None => grouped.push((r, 1)),
            }
        }
        Ok(Self::assemble(Polynomial::from_roots(roots), delta, grouped))
    }

    fn assemble(p: Polynomial, delta: Complexd, roots: Vec<(Complexd, usize)>) -> Self {
        let dp = p.derivative();
        let normal = build_normal_form(&p, &dp, delta);
        let d = p.degree().unwrap_or(0);
        let chart = if degenerate_delta(d, delta) {
            RationalMap::new(normal.num.trimmed(1e-9), normal.den.clone())
        } else {
            normal.clone()
        };
        Self { p, dp, delta, roots, normal, chart }
    }

    /// The same polynomial with a different damping parameter.
    pub fn with_delta(&self, delta: Complexd) -> Self {
        Self::assemble(self.p.clone(), delta, self.roots.clone())
    }

    pub fn poly(&self) -> &Polynomial {
        &self.p
    }

    pub fn derivative(&self) -> &Polynomial {
        &self.dp
    }

    pub fn delta(&self) -> Complexd {
        self.delta
    }

    pub fn degree(&self) -> usize {
        self.p.degree().unwrap_or(0)
    }

    /// Distinct roots with multiplicities.
    pub fn roots(&self) -> &[(Complexd, usize)] {
        &self.roots
    }

    /// One Newton step.
    pub fn newton_step(&self, z: SpherePoint) -> Result<SpherePoint, MapError> {
        match z {
            SpherePoint::Infinity => Ok(SpherePoint::Infinity),
            SpherePoint::Finite(z) => Ok(match self.newton_parts(z)? {
                Newton::Root => SpherePoint::Finite(z),
                Newton::Pole => SpherePoint::Infinity,
                Newton::Step { n, .. } => SpherePoint::from_complex(n),
            }),
        }
    }

    /// One damped Traub step. With `delta = 0` this is exactly [`Self::newton_step`].
    pub fn traub_step(&self, z: SpherePoint) -> Result<SpherePoint, MapError> {
        if self.delta == Complexd::new(0.0, 0.0) {
            return self.newton_step(z);
        }
        let z = match z {
            SpherePoint::Infinity => return Ok(self.chart.eval_sphere(SpherePoint::Infinity)),
            SpherePoint::Finite(z) if z.norm() > CHART_RADIUS => {
                return Ok(self.chart.eval_at_inverse(z.inv()));
            }
            SpherePoint::Finite(z) => z,
        };
        match self.newton_parts(z)? {
            Newton::Root => Ok(SpherePoint::Finite(z)),
            Newton::Pole => Ok(SpherePoint::Infinity),
            Newton::Step { n, ratio } => {
                // p(N)/p'(z) = prod ((N - a)/(z - a))^k * p(z)/p'(z)
                let mut prod = Complexd::new(1.0, 0.0);
                for &(a, k) in &self.roots {
                    prod *= ((n - a) / (z - a)).powi(k as i32);
                }
                let t = n - self.delta * prod * ratio;
                if t.re.is_finite() && t.im.is_finite() {
                    Ok(SpherePoint::Finite(t))
                } else {
                    Ok(self.chart.eval_sphere(SpherePoint::Finite(z)))
                }
            }
        }
    }

    /// `1 / T(1/w)`: the map in the chart at infinity.
    pub fn step_in_inverse_chart(&self, w: Complexd) -> SpherePoint {
        self.chart.eval_at_inverse(w).recip()
    }

    fn newton_parts(&self, z: Complexd) -> Result<Newton, MapError> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(MapError::Indeterminate(z));
        }
        let mut log_deriv = Complexd::new(0.0, 0.0);
        let mut scale = 0.0;
        for &(a, k) in &self.roots {
            let diff = z - a;
            if diff == Complexd::new(0.0, 0.0) {
                return Ok(Newton::Root);
            }
            let term = diff.inv() * k as f64;
            log_deriv += term;
            scale += term.norm();
        }
        if log_deriv.norm() <= POLE_EPS * scale {
            return Ok(Newton::Pole);
        }
        let ratio = log_deriv.inv();
        Ok(Newton::Step { n: z - ratio, ratio })
    }

    /// Unreduced rational normal form `num / p'^(d+1)`.
    pub fn normal_form(&self) -> &RationalMap {
        &self.normal
    }

    /// Multiplier of the root `root` of multiplicity `k`.
    pub fn root_multiplier(&self, _root: Complexd, k: usize) -> FixedPointClass {
        root_multiplier(self.delta, k)
    }

    pub fn infinity_class(&self) -> InfinityClass {
        infinity_class(self.degree(), self.delta)
    }
}

enum Newton {
    Root,
    Pole,
    Step { n: Complexd, ratio: Complexd },
}

fn build_normal_form(p: &Polynomial, dp: &Polynomial, delta: Complexd) -> RationalMap {
    let d = p.degree().unwrap_or(0) as u32;
    let newton = RationalMap::new(&(&Polynomial::z() * dp) - p, dp.clone());
    let p_of_n = rational_compose(p, &newton);
    let dp_pow_d = dp.pow(d);
    let head = &newton.num * &dp_pow_d;
    let num = &head - &p_of_n.num.scale(delta);
    RationalMap::new(num, &dp_pow_d * dp)
}

/// `d^d / (d-1)^(d-1)`, where infinity stops being fixed.
pub fn degenerate_parameter(d: usize) -> f64 {
    let d = d as f64;
    d.powf(d) / (d - 1.0).powf(d - 1.0)
}

fn degenerate_delta(d: usize, delta: Complexd) -> bool {
    let c = degenerate_parameter(d);
    (delta - c).norm() <= CLASS_TOL * c
}

/// `(k-1)/k - delta ((k-1)/k)^k / k`.
pub fn root_multiplier(delta: Complexd, k: usize) -> FixedPointClass {
    assert!(k >= 1, "root multiplicity must be positive");
    let kf = k as f64;
    let base = (kf - 1.0) / kf;
    FixedPointClass::from_multiplier(Complexd::new(base, 0.0) - delta * base.powi(k as i32) / kf)
}

/// Fixed-point type of infinity for a degree-`d` polynomial.
pub fn infinity_class(d: usize, delta: Complexd) -> InfinityClass {
    let df = d as f64;
    let centre = degenerate_parameter(d);
    let radius = df.powf(df + 1.0) / (df - 1.0).powf(df);
    let dist = (delta - centre).norm();
    if dist <= CLASS_TOL * centre {
        return InfinityClass::NotFixed;
    }
    let multiplier = Complexd::new(df.powf(df + 1.0), 0.0)
        / ((df - 1.0) * (Complexd::new(df.powf(df), 0.0) - delta * (df - 1.0).powf(df - 1.0)));
    let kind = if (dist - radius).abs() <= CLASS_TOL * radius {
        FixedPointKind::Indifferent
    } else if dist < radius {
        FixedPointKind::Repelling
    } else {
        FixedPointKind::Attracting
    };
    InfinityClass::Fixed(FixedPointClass { kind, multiplier })
}

pub fn newton_step(m: &TraubMap, z: SpherePoint) -> Result<SpherePoint, MapError> {
    m.newton_step(z)
}

pub fn traub_step(m: &TraubMap, z: SpherePoint) -> Result<SpherePoint, MapError> {
    m.traub_step(z)
}

pub fn normal_form(m: &TraubMap) -> RationalMap {
    m.normal_form().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::chordal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complexd {
        Complexd::new(re, im)
    }

    fn fin(re: f64, im: f64) -> SpherePoint {
        SpherePoint::Finite(c(re, im))
    }

    fn quad() -> Polynomial {
        Polynomial::from_real(&[-1.0, 0.0, 1.0])
    }

    fn cubic() -> Polynomial {
        Polynomial::monomial_minus(3, c(1.0, 0.0))
    }

    #[test]
    fn newton_step_examples() {
        let m = TraubMap::new(quad(), c(0.0, 0.0)).unwrap();
        let n = m.newton_step(fin(2.0, 0.0)).unwrap().finite().unwrap();
        assert!((n - 1.25).norm() < 1e-15);
        let one = m.newton_step(fin(1.0, 0.0)).unwrap().finite().unwrap();
        assert!((one - 1.0).norm() < 1e-15);
        assert_eq!(m.newton_step(SpherePoint::Infinity).unwrap(), SpherePoint::Infinity);
        let m3 = TraubMap::new(cubic(), c(0.0, 0.0)).unwrap();
        assert_eq!(m3.newton_step(fin(0.0, 0.0)).unwrap(), SpherePoint::Infinity);
    }

    #[test]
    fn traub_step_examples() {
        let m = TraubMap::new(quad(), c(1.0, 0.0)).unwrap();
        let t = m.traub_step(fin(2.0, 0.0)).unwrap().finite().unwrap();
        assert!((t - 1.109375).norm() < 1e-14, "{t}");
        let m3 = TraubMap::from_roots(
            &(0..3)
                .map(|k| Complexd::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0))
                .collect::<Vec<_>>(),
            c(1.0, 0.0),
        )
        .unwrap();
        assert_eq!(m3.traub_step(fin(1.0, 0.0)).unwrap(), fin(1.0, 0.0));
        assert_eq!(m3.traub_step(fin(0.0, 0.0)).unwrap(), SpherePoint::Infinity);
    }

    #[test]
    fn zero_damping_is_newton_bit_for_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Polynomial::from_roots(&[c(0.3, 1.0), c(-1.0, 0.2), c(0.9, -0.4), c(0.1, 0.1)]);
        let m = TraubMap::new(p, c(0.0, 0.0)).unwrap();
        for _ in 0..100 {
            let z = fin(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            assert_eq!(m.traub_step(z).unwrap(), m.newton_step(z).unwrap());
        }
    }

    #[test]
    fn nan_input_is_indeterminate() {
        let m = TraubMap::new(quad(), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            m.traub_step(SpherePoint::Finite(c(f64::NAN, 0.0))),
            Err(MapError::Indeterminate(_))
        ));
    }

    #[test]
    fn linear_polynomial_rejected() {
        assert_eq!(
            TraubMap::new(Polynomial::from_real(&[1.0, 1.0]), c(1.0, 0.0)).unwrap_err(),
            MapError::DegreeTooLow
        );
    }

    #[test]
    fn normal_form_degrees_and_leading_coefficient() {
        let m = TraubMap::new(quad(), c(1.0, 0.0)).unwrap();
        let nf = m.normal_form();
        assert_eq!(nf.num.degree(), Some(4));
        assert_eq!(nf.den.degree(), Some(3));
        // d^(d+1) - d^d - delta (d-1)^d = 8 - 4 - 1
        assert!((nf.num.leading() - 3.0).norm() < 1e-14);

        let degenerate = TraubMap::new(quad(), c(4.0, 0.0)).unwrap();
        let nf = degenerate.normal_form();
        let lead = nf.num.coeffs().get(4).copied().unwrap_or_default();
        assert!(lead.norm() < 1e-9 * nf.num.max_coeff_norm());
    }

    #[test]
    fn normal_form_of_cubic_matches_closed_expression() {
        for delta in [c(0.5, 0.0), c(1.0, 0.0), c(2.0, -1.5), c(6.75, 0.0)] {
            let m = TraubMap::new(cubic(), delta).unwrap();
            let nf = m.normal_form().reduced(1e-8);
            let scale = c(81.0, 0.0) / nf.den.leading();
            let mut expect_num = [c(0.0, 0.0); 10];
            expect_num[9] = c(54.0, 0.0) - delta * 8.0;
            expect_num[6] = c(27.0, 0.0) + delta * 15.0;
            expect_num[3] = -delta * 6.0;
            expect_num[0] = -delta;
            let got = nf.num.scale(scale);
            for k in 0..10 {
                let g = got.coeffs().get(k).copied().unwrap_or_default();
                assert!(
                    (g - expect_num[k]).norm() <= 1e-10 * expect_num[k].norm().max(1.0),
                    "delta {delta} coefficient {k}: {g} vs {}",
                    expect_num[k]
                );
            }
            let den = nf.den.scale(scale);
            assert_eq!(den.degree(), Some(8));
            assert!((den.leading() - 81.0).norm() < 1e-10);
        }
    }

    #[test]
    fn normal_form_agrees_with_direct_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let polys = [
            quad(),
            cubic(),
            Polynomial::from_roots(&[c(0.0, 0.5), c(0.0, -0.5), c(0.439, 0.0)]),
            Polynomial::from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]),
            Polynomial::monomial_minus(5, c(0.5, 1.0)),
        ];
        for p in polys {
            for delta in [0.0, 0.3, 0.7, 1.0] {
                let m = TraubMap::new(p.clone(), c(delta, 0.0)).unwrap();
                for _ in 0..1000 {
                    let z = fin(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                    let direct = m.traub_step(z).unwrap();
                    let via_nf = m.normal_form().eval_sphere(z);
                    assert!(chordal(direct, via_nf) < 1e-9, "{p:?} delta {delta} z {z:?}");
                }
            }
        }
    }

    #[test]
    fn infinity_is_handled_in_the_chart() {
        let m = TraubMap::new(cubic(), c(1.0, 0.0)).unwrap();
        assert_eq!(m.traub_step(SpherePoint::Infinity).unwrap(), SpherePoint::Infinity);
        let z = c(3e9, -1e9);
        let t = m.traub_step(fin(z.re, z.im)).unwrap().finite().unwrap();
        let expect = (z.powu(9) * 46.0 + z.powu(6) * 42.0 - z.powu(3) * 6.0 - 1.0) / (z.powu(8) * 81.0);
        assert!((t - expect).norm() <= 1e-12 * expect.norm());

        // at the degenerate parameter infinity maps to 0 for z^3 - 1
        let m = TraubMap::new(cubic(), c(6.75, 0.0)).unwrap();
        let img = m.traub_step(SpherePoint::Infinity).unwrap().finite().unwrap();
        assert!(img.norm() < 1e-12);
    }

    #[test]
    fn root_multiplier_examples() {
        let simple = root_multiplier(c(0.37, 2.0), 1);
        assert_eq!(simple.kind, FixedPointKind::Superattracting);
        assert_eq!(simple.multiplier, c(0.0, 0.0));
        let double = root_multiplier(c(1.0, 0.0), 2);
        assert!((double.multiplier - 0.375).norm() < 1e-15);
        assert_eq!(double.kind, FixedPointKind::Attracting);
        let edge = root_multiplier(c(12.0, 0.0), 2);
        assert!((edge.multiplier.norm() - 1.0).abs() < 1e-15);
        assert_eq!(edge.kind, FixedPointKind::Indifferent);
    }

    #[test]
    fn root_multiplier_attracting_iff_in_disk() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..2000 {
            let k = rng.gen_range(2..6usize);
            let delta = c(rng.gen_range(-20.0..40.0), rng.gen_range(-30.0..30.0));
            let kf = k as f64;
            let centre = kf.powf(kf) / (kf - 1.0).powf(kf - 1.0);
            let radius = kf.powf(kf + 1.0) / (kf - 1.0).powf(kf);
            let dist = (delta - centre).norm();
            if (dist - radius).abs() < 1e-9 {
                continue;
            }
            assert_eq!(root_multiplier(delta, k).is_attracting(), dist < radius);
        }
    }

    #[test]
    fn infinity_class_examples() {
        match infinity_class(2, c(0.0, 0.0)) {
            InfinityClass::Fixed(f) => {
                assert!((f.multiplier - 2.0).norm() < 1e-15);
                assert_eq!(f.kind, FixedPointKind::Repelling);
            }
            other => panic!("{other:?}"),
        }
        match infinity_class(2, c(1.0, 0.0)) {
            InfinityClass::Fixed(f) => {
                assert!((f.multiplier - 8.0 / 3.0).norm() < 1e-15);
                assert_eq!(f.kind, FixedPointKind::Repelling);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(infinity_class(3, c(6.75, 0.0)), InfinityClass::NotFixed);
        assert!(infinity_class(2, c(100.0, 0.0)).is_attracting());
        match infinity_class(2, c(12.0, 0.0)) {
            InfinityClass::Fixed(f) => assert_eq!(f.kind, FixedPointKind::Indifferent),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multiplier_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = 1e-6;
        for _ in 0..30 {
            let d = rng.gen_range(2..=5);
            let roots: Vec<Complexd> = (0..d)
                .map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                .collect();
            for delta in [0.0, 0.3, 0.7, 1.0] {
                let m = TraubMap::from_roots(&roots, c(delta, 0.0)).unwrap();
                for &(a, k) in m.roots() {
                    let plus = m.traub_step(SpherePoint::Finite(a + h)).unwrap().finite().unwrap();
                    let minus = m.traub_step(SpherePoint::Finite(a - h)).unwrap().finite().unwrap();
                    let fd = (plus - minus) / (2.0 * h);
                    let exact = m.root_multiplier(a, k).multiplier;
                    assert!((fd - exact).norm() < 1e-5, "fd {fd} vs {exact}");
                }
            }
        }
    }
}
