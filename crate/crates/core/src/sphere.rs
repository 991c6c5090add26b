//! Points of the Riemann sphere and the chordal metric.

use crate::poly::Complexd;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complexd),
    Infinity,
}

impl SpherePoint {
    /// Wraps a complex value, sending non-finite values to infinity.
    pub fn from_complex(z: Complexd) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn finite(self) -> Option<Complexd> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// `1/z` with `1/0 = inf` and `1/inf = 0`.
    pub fn recip(self) -> Self {
        match self {
            SpherePoint::Infinity => SpherePoint::Finite(Complexd::new(0.0, 0.0)),
            SpherePoint::Finite(z) if z.re == 0.0 && z.im == 0.0 => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::from_complex(z.inv()),
        }
    }

    /// Modulus, infinite at the point at infinity.
    pub fn norm(self) -> f64 {
        match self {
            SpherePoint::Finite(z) => z.norm(),
            SpherePoint::Infinity => f64::INFINITY,
        }
    }
}

impl From<Complexd> for SpherePoint {
    fn from(z: Complexd) -> Self {
        SpherePoint::from_complex(z)
    }
}

/// Chordal distance `2|z-w| / sqrt((1+|z|^2)(1+|w|^2))`, at most 2.
pub fn chordal(a: SpherePoint, b: SpherePoint) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            let (nz, nw) = (z.norm(), w.norm());
            if nz <= 1.0 || nw <= 1.0 {
                let denom = (1.0 + nz * nz).sqrt() * (1.0 + nw * nw).sqrt();
                if denom.is_finite() {
                    return 2.0 * (z - w).norm() / denom;
                }
            }
            // Both large: the metric is invariant under inversion.
            let (zi, wi) = (z.inv(), w.inv());
            let denom = (1.0 + zi.norm_sqr()).sqrt() * (1.0 + wi.norm_sqr()).sqrt();
            2.0 * (zi - wi).norm() / denom
        }
    }
}

/// Chordal distance between two finite points.
pub fn chordal_c(z: Complexd, w: Complexd) -> f64 {
    chordal(SpherePoint::Finite(z), SpherePoint::Finite(w))
}
