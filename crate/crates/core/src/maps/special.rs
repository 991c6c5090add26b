//! Closed forms: single-root polynomials, `z^n - beta`, and the free critical
//! points of the cubic `z^3 - 1`.

use super::TraubMap;
use crate::poly::{Complexd, Polynomial, RationalMap};

/// An explicit expression for the map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `T(z) = fixed + slope * (z - fixed)`.
    Affine { fixed: Complexd, slope: Complexd },
}

impl ClosedForm {
    pub fn eval(&self, z: Complexd) -> Complexd {
        match *self {
            ClosedForm::Affine { fixed, slope } => fixed + slope * (z - fixed),
        }
    }
}

/// Detects `p = c (z - a)^n`, for which the map is affine with slope
/// `((n-1)/n)(1 - delta (n-1)^(n-1) / n^n)`.
///
/// This covers the double-root quadratic and `z^n` alike.
pub fn special_form(m: &TraubMap) -> Option<ClosedForm> {
    match m.roots() {
        [(a, n)] => {
            let nf = *n as f64;
            let slope = (Complexd::new(1.0, 0.0)
                - m.delta() * (nf - 1.0).powi(*n as i32 - 1) / nf.powi(*n as i32))
                * ((nf - 1.0) / nf);
            Some(ClosedForm::Affine { fixed: *a, slope })
        }
        _ => None,
    }
}

/// The map for `z^n - beta` written out directly:
/// `[n^n (n-1) z^(n^2) + beta n^n (1+delta) z^(n(n-1)) - delta ((n-1) z^n + beta)^n] / (n^(n+1) z^(n^2-1))`.
pub fn monomial_normal_form(n: usize, beta: Complexd, delta: Complexd) -> RationalMap {
    assert!(n >= 2);
    let nf = n as f64;
    let nn = nf.powi(n as i32);
    let mut head = vec![Complexd::new(0.0, 0.0); n * n + 1];
    head[n * n] = Complexd::new(nn * (nf - 1.0), 0.0);
    head[n * (n - 1)] = beta * nn * (delta + 1.0);
    let mut inner = vec![Complexd::new(0.0, 0.0); n + 1];
    inner[0] = beta;
    inner[n] = Complexd::new(nf - 1.0, 0.0);
    let num = &Polynomial::new(head) - &Polynomial::new(inner).pow(n as u32).scale(delta);
    let mut den = vec![Complexd::new(0.0, 0.0); n * n];
    den[n * n - 1] = Complexd::new(nn * nf, 0.0);
    RationalMap::new(num, Polynomial::new(den))
}

/// Free critical points of the map for `z^3 - 1` on the ray through 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCriticalPoints {
    pub r_plus: Complexd,
    pub r_minus: Complexd,
    pub c_plus: Complexd,
    pub c_minus: Complexd,
}

/// `r = (19 delta +- sqrt(27 (16 delta + 11 delta^2))) / (54 - 8 delta)` and
/// `c = r^(1/3)`.
///
/// The cube root is the real one when `r` is real, so that for real
/// `delta > 0` the minus point sits on the negative axis; otherwise it is
/// the principal root.
pub fn cubic_critical_points(delta: Complexd) -> CubicCriticalPoints {
    let s = (delta * (delta * 11.0 + 16.0) * 27.0).sqrt();
    let den = Complexd::new(54.0, 0.0) - delta * 8.0;
    let r_plus = (delta * 19.0 + s) / den;
    let r_minus = (delta * 19.0 - s) / den;
    CubicCriticalPoints {
        r_plus,
        r_minus,
        c_plus: cube_root(r_plus),
        c_minus: cube_root(r_minus),
    }
}

fn cube_root(r: Complexd) -> Complexd {
    if r.im == 0.0 {
        Complexd::new(r.re.cbrt(), 0.0)
    } else {
        r.cbrt()
    }
}
