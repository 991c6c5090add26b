use super::{cluster_roots, poly_roots, Complexd, Polynomial};
use crate::sphere::SpherePoint;

/// A quotient `num / den` of polynomials.
///
/// Common factors are kept unless [`RationalMap::reduced`] is called, so that
/// degree bookkeeping of unreduced constructions stays visible.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalMap {
    /// Panics if `den` is the zero polynomial.
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "rational map with zero denominator");
        Self { num, den }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::new(p, Polynomial::one())
    }

    /// Degree as a self-map of the sphere, `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Evaluates at a finite point; poles give infinity.
    pub fn eval(&self, z: Complexd) -> SpherePoint {
        let d = self.den.eval(z);
        let n = self.num.eval(z);
        if d == Complexd::new(0.0, 0.0) {
            return if n == Complexd::new(0.0, 0.0) {
                SpherePoint::Finite(self.limit_at(z))
            } else {
                SpherePoint::Infinity
            };
        }
        SpherePoint::from_complex(n / d)
    }

    /// Evaluates on the sphere, switching to the chart `w = 1/z` outside the
    /// unit disk.
    pub fn eval_sphere(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Finite(z) if z.norm() <= 1.0 => self.eval(z),
            SpherePoint::Finite(z) => self.eval_at_inverse(z.inv()),
            SpherePoint::Infinity => self.eval_at_inverse(Complexd::new(0.0, 0.0)),
        }
    }

    /// `R(1/w)` computed from the reversed polynomials.
    pub fn eval_at_inverse(&self, w: Complexd) -> SpherePoint {
        let dn = self.num.degree().unwrap_or(0) as i32;
        let dd = self.den.degree().unwrap_or(0) as i32;
        let rn = self.num.eval_reversed(w);
        let rd = self.den.eval_reversed(w);
        // R(1/w) = w^(dd - dn) * rn / rd
        let shift = dd - dn;
        let zero = Complexd::new(0.0, 0.0);
        if shift >= 0 {
            let top = rn * w.powi(shift);
            if rd == zero {
                return if top == zero { SpherePoint::Finite(zero) } else { SpherePoint::Infinity };
            }
            SpherePoint::from_complex(top / rd)
        } else {
            let bottom = rd * w.powi(-shift);
            if bottom == zero {
                return if rn == zero { SpherePoint::Finite(zero) } else { SpherePoint::Infinity };
            }
            SpherePoint::from_complex(rn / bottom)
        }
    }

    fn limit_at(&self, z: Complexd) -> Complexd {
        let (mut n, mut d) = (self.num.clone(), self.den.clone());
        loop {
            n = n.derivative();
            d = d.derivative();
            let (nv, dv) = (n.eval(z), d.eval(z));
            if dv != Complexd::new(0.0, 0.0) {
                return nv / dv;
            }
            if d.is_zero() {
                return Complexd::new(f64::INFINITY, 0.0);
            }
        }
    }

    /// Cancels common roots of numerator and denominator.
    ///
    /// Denominator roots are located and clustered; a cluster centre is
    /// cancelled while the numerator still vanishes there relative to its
    /// evaluation scale (`rel_tol`).
    pub fn reduced(&self, rel_tol: f64) -> Self {
        if self.den.degree().unwrap_or(0) == 0 || self.num.is_zero() {
            return self.clone();
        }
        let Ok(roots) = poly_roots(&self.den) else {
            return self.clone();
        };
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for (r, mult) in cluster_roots(&self.den, &roots) {
            let factor = Polynomial::new(vec![-r, Complexd::new(1.0, 0.0)]);
            for _ in 0..mult {
                if num.degree().unwrap_or(0) == 0 {
                    break;
                }
                if num.eval(r).norm() > rel_tol * num.eval_scale(r) {
                    break;
                }
                num = num.div_rem(&factor).0;
                den = den.div_rem(&factor).0;
            }
        }
        Self::new(num, den)
    }
}

/// `p(inner)` as a rational map with denominator `inner.den^deg p`.
///
/// The numerator is accumulated by Horner's rule over polynomials:
/// `acc = acc * num + a_k * den^(d-k)`.
pub fn rational_compose(p: &Polynomial, inner: &RationalMap) -> RationalMap {
    let Some(d) = p.degree() else {
        return RationalMap::new(Polynomial::zero(), Polynomial::one());
    };
    let mut den_pows = Vec::with_capacity(d + 1);
    den_pows.push(Polynomial::one());
    for k in 1..=d {
        den_pows.push(&den_pows[k - 1] * &inner.den);
    }
    let mut acc = Polynomial::zero();
    for (k, &a) in p.coeffs().iter().enumerate().rev() {
        acc = &(&acc * &inner.num) + &den_pows[d - k].scale(a);
    }
    RationalMap::new(acc, den_pows.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complexd {
        Complexd::new(re, im)
    }

    fn newton_map(p: &Polynomial) -> RationalMap {
        let dp = p.derivative();
        RationalMap::new(&(&Polynomial::z() * &dp) - p, dp)
    }

    #[test]
    fn compose_quadratic_with_its_newton_map() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let n = newton_map(&p);
        assert_eq!(n.num, Polynomial::from_real(&[1.0, 0.0, 1.0]));
        assert_eq!(n.den, Polynomial::from_real(&[0.0, 2.0]));
        let r = rational_compose(&p, &n);
        assert_eq!(r.num, Polynomial::from_real(&[1.0, 0.0, -2.0, 0.0, 1.0]));
        assert_eq!(r.den, Polynomial::from_real(&[0.0, 0.0, 4.0]));
    }

    #[test]
    fn identity_composition() {
        let inner = RationalMap::new(
            Polynomial::new(vec![c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0)]),
            Polynomial::from_real(&[2.0, 1.0]),
        );
        assert_eq!(rational_compose(&Polynomial::z(), &inner), inner);
    }

    #[test]
    fn polynomial_inner_reduces_to_composition() {
        let p = Polynomial::from_real(&[1.0, -2.0, 0.0, 1.0]);
        let q = Polynomial::new(vec![c(0.5, 1.0), c(2.0, 0.0), c(0.0, -1.0)]);
        let r = rational_compose(&p, &RationalMap::polynomial(q.clone()));
        assert_eq!(r.den, Polynomial::one());
        let direct = p.compose(&q);
        for (a, b) in r.num.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn composition_matches_pointwise_newton() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let n = newton_map(&p);
        let r = rational_compose(&p, &n);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let nz = z - p.eval(z) / p.derivative().eval(z);
            let want = p.eval(nz);
            let got = r.eval(z).finite().unwrap();
            assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0));
        }
    }

    #[test]
    fn sphere_evaluation_handles_infinity() {
        let r = RationalMap::new(
            Polynomial::from_real(&[1.0, 0.0, 3.0]),
            Polynomial::from_real(&[0.0, 2.0]),
        );
        assert_eq!(r.eval_sphere(SpherePoint::Infinity), SpherePoint::Infinity);
        assert_eq!(r.eval(c(0.0, 0.0)), SpherePoint::Infinity);
        let big = c(1e12, -3e11);
        let direct = (big * big * 3.0 + 1.0) / (big * 2.0);
        let chart = r.eval_sphere(SpherePoint::Finite(big)).finite().unwrap();
        assert!((chart - direct).norm() <= 1e-14 * direct.norm());

        let flat = RationalMap::new(Polynomial::from_real(&[1.0]), Polynomial::from_real(&[0.0, 0.0, 1.0]));
        assert_eq!(flat.eval_sphere(SpherePoint::Infinity), SpherePoint::Finite(c(0.0, 0.0)));
    }

    #[test]
    fn reduction_cancels_shared_roots() {
        let a = c(0.4, -0.2);
        let num = Polynomial::from_roots(&[a, a, c(1.0, 1.0)]);
        let den = Polynomial::from_roots(&[a, a, a, c(-2.0, 0.0)]);
        let r = RationalMap::new(num, den).reduced(1e-8);
        assert_eq!(r.num.degree(), Some(1));
        assert_eq!(r.den.degree(), Some(2));
    }
}
