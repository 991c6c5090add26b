//! The quadratic family in conjugated form:
//! `G(z) = z^2 (z^2 + 2z + 1 - delta) / ((1 - delta) z^2 + 2z + 1)`.

use crate::poly::Complexd;
use crate::maps::CHART_RADIUS;
use crate::sphere::SpherePoint;

/// Evaluates `G` on the sphere. Large arguments use the chart `w = 1/z`
/// directly rather than the inversion symmetry, so that symmetry can be
/// checked independently.
pub fn gdelta_eval(delta: Complexd, z: SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Infinity => SpherePoint::Infinity,
        SpherePoint::Finite(z) => gdelta_eval_c(delta, z),
    }
}

pub fn gdelta_eval_c(delta: Complexd, z: Complexd) -> SpherePoint {
    let zero = Complexd::new(0.0, 0.0);
    let a = Complexd::new(1.0, 0.0) - delta;
    if z.norm() > CHART_RADIUS {
        let w = z.inv();
        let top = Complexd::new(1.0, 0.0) + w * 2.0 + a * w * w;
        let bottom = w * w * (a + w * 2.0 + w * w);
        if bottom == zero {
            return SpherePoint::Infinity;
        }
        return SpherePoint::from_complex(top / bottom);
    }
    let z2 = z * z;
    let num = z2 * (z2 + z * 2.0 + a);
    let den = a * z2 + z * 2.0 + 1.0;
    if den == zero {
        if num == zero {
            // removable singularity (delta = 4 at z = 1, where G = -1)
            let dnum = z2 * z * 4.0 + z2 * 6.0 + a * z * 2.0;
            let dden = a * z * 2.0 + 2.0;
            return SpherePoint::from_complex(dnum / dden);
        }
        return SpherePoint::Infinity;
    }
    SpherePoint::from_complex(num / den)
}

/// The free critical points `c+` and `c-`, roots of
/// `(1-delta) z^2 + (2 + delta) z + (1 - delta)`, so `c+ c- = 1`.
///
/// Labels follow the principal square root; the larger-modulus root is
/// computed directly and the other as its reciprocal. At `delta = 1` the
/// pair degenerates to `0` and infinity.
pub fn gdelta_critical_points(delta: Complexd) -> (Complexd, SpherePoint) {
    let zero = Complexd::new(0.0, 0.0);
    let a = Complexd::new(1.0, 0.0) - delta;
    let b = Complexd::new(2.0, 0.0) + delta;
    if a == zero {
        return (zero, SpherePoint::Infinity);
    }
    let s = (b * b - a * a * 4.0).sqrt();
    if (b + s).norm() >= (b - s).norm() {
        // (-b - s) / 2a is the larger root: the minus branch
        let minus = -(b + s) / (a * 2.0);
        (minus.inv(), SpherePoint::from_complex(minus))
    } else {
        let plus = (s - b) / (a * 2.0);
        let minus = if plus == zero { SpherePoint::Infinity } else { SpherePoint::from_complex(plus.inv()) };
        (plus, minus)
    }
}

/// `h(z) = (z - a2) / (z - a1)`, sending `a2` to 0 and `a1` to infinity.
pub fn quadratic_conjugacy(a1: Complexd, a2: Complexd, z: SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Infinity => SpherePoint::Finite(Complexd::new(1.0, 0.0)),
        SpherePoint::Finite(z) => {
            let den = z - a1;
            if den == Complexd::new(0.0, 0.0) {
                SpherePoint::Infinity
            } else {
                SpherePoint::from_complex((z - a2) / den)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::TraubMap;
    use crate::sphere::chordal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complexd {
        Complexd::new(re, im)
    }

    #[test]
    fn fixed_points_and_special_values() {
        assert!(chordal(gdelta_eval_c(c(1.0, 0.0), c(2.0, 0.0)), SpherePoint::Finite(c(6.4, 0.0))) < 1e-14);
        for delta in [c(0.5, 0.0), c(1.0, 0.0), c(3.0, 2.0)] {
            assert!(chordal(gdelta_eval_c(delta, c(1.0, 0.0)), SpherePoint::Finite(c(1.0, 0.0))) < 1e-14);
            assert!(chordal(gdelta_eval_c(delta, c(-1.0, 0.0)), SpherePoint::Finite(c(1.0, 0.0))) < 1e-14);
        }
        for delta in [c(0.0, 0.0), c(1.0, 0.0), c(2.5, -1.0), c(4.0, 0.0)] {
            assert_eq!(gdelta_eval_c(delta, c(0.0, 0.0)), SpherePoint::Finite(c(0.0, 0.0)));
            assert_eq!(gdelta_eval(delta, SpherePoint::Infinity), SpherePoint::Infinity);
        }
        // delta = 0 is z^2
        let z = c(0.3, 0.7);
        assert!(chordal(gdelta_eval_c(c(0.0, 0.0), z), SpherePoint::Finite(z * z)) < 1e-15);
        // delta = 4: removable singularity at 1; the common factor z - 1
        // cancels and leaves z^2 (z + 3) / -(3z + 1) = -1
        let g1 = gdelta_eval_c(c(4.0, 0.0), c(1.0, 0.0)).finite().unwrap();
        assert!((g1 + 1.0).norm() < 1e-15, "{g1}");
    }

    #[test]
    fn conjugate_of_quadratic_traub_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a1 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let a2 = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if (a1 - a2).norm() < 0.2 {
                continue;
            }
            let delta = c(rng.gen_range(-1.0..5.0), rng.gen_range(-2.0..2.0));
            let m = TraubMap::from_roots(&[a1, a2], delta).unwrap();
            for _ in 0..50 {
                let z = SpherePoint::Finite(c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)));
                let lhs = quadratic_conjugacy(a1, a2, m.traub_step(z).unwrap());
                let rhs = gdelta_eval(delta, quadratic_conjugacy(a1, a2, z));
                assert!(chordal(lhs, rhs) < 1e-8, "{lhs:?} vs {rhs:?}");
            }
        }
    }

    #[test]
    fn inversion_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let delta = c(rng.gen_range(-3.0..8.0), rng.gen_range(-4.0..4.0));
            let z = SpherePoint::Finite(c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)));
            let lhs = gdelta_eval(delta, z.recip()).recip();
            let rhs = gdelta_eval(delta, z);
            assert!(chordal(lhs, rhs) < 1e-10);
        }
    }

    #[test]
    fn critical_points_are_reciprocal_and_critical() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let delta = c(rng.gen_range(-3.0..8.0), rng.gen_range(-4.0..4.0));
            let (p, m) = gdelta_critical_points(delta);
            let m = m.finite().unwrap();
            assert!((p * m - 1.0).norm() < 1e-10);
            for z in [p, m] {
                let h = 1e-6 * z.norm().max(1e-3);
                let f = |x: Complexd| gdelta_eval_c(delta, x).finite().unwrap();
                let deriv = (f(z + h) - f(z - h)) / (2.0 * h);
                let scale = f(z + h).norm().max(1.0) / z.norm().max(1e-3);
                assert!(deriv.norm() < 1e-4 * scale, "delta {delta} z {z} G' {deriv}");
            }
        }
        assert_eq!(
            gdelta_critical_points(c(1.0, 0.0)),
            (c(0.0, 0.0), SpherePoint::Infinity)
        );
        let (p, m) = gdelta_critical_points(c(0.5, 0.0));
        assert!((p - c(-0.20871215252208, 0.0)).norm() < 1e-10, "{p}");
        assert!((m.finite().unwrap() - c(-4.79128784747792, 0.0)).norm() < 1e-10);
        let (p, _) = gdelta_critical_points(c(1.0 - 1e-9, 0.0));
        assert!(p.norm() < 1e-8);
    }
}
