//! Dense complex polynomials, rational maps built from them, and an
//! Aberth–Ehrlich all-roots solver.

mod rational;
mod roots;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub use rational::{rational_compose, RationalMap};
pub use roots::{cluster_roots, poly_roots, poly_roots_with, RootOptions, CLUSTER_TOL};

/// Complex scalar used throughout the crate.
pub type Complexd = Complex64;

/// Errors raised by polynomial root finding.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("root finding requires degree >= 1, got {0:?}")]
    DegreeTooLow(Option<usize>),
    #[error("Aberth iteration did not converge after {sweeps} sweeps (worst residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },
    #[error("non-finite coefficient in polynomial")]
    NonFinite,
}

/// A polynomial with complex coefficients stored in ascending degree order.
///
/// The zero polynomial is the empty coefficient list; any other value has a
/// nonzero leading coefficient.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Complexd>,
}

impl Polynomial {
    /// Builds a polynomial, dropping exactly-zero leading coefficients.
    pub fn new(mut coeffs: Vec<Complexd>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complexd::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complexd::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complexd) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complexd::new(1.0, 0.0))
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    /// `z^n - beta`.
    pub fn monomial_minus(n: usize, beta: Complexd) -> Self {
        let mut coeffs = vec![Complexd::new(0.0, 0.0); n + 1];
        coeffs[0] = -beta;
        coeffs[n] = Complexd::new(1.0, 0.0);
        Self::new(coeffs)
    }

    /// The monic polynomial with the given roots, repeated entries giving multiplicity.
    pub fn from_roots(roots: &[Complexd]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| {
            acc * Self::new(vec![-r, Complexd::new(1.0, 0.0)])
        })
    }

    pub fn coeffs(&self) -> &[Complexd] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complexd {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Largest coefficient modulus; 0 for the zero polynomial.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complexd) -> Complexd {
        self.coeffs
            .iter()
            .rev()
            .fold(Complexd::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Evaluates the polynomial and its first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complexd) -> (Complexd, Complexd) {
        let zero = Complexd::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |a_k| |z|^k`, the natural scale for rounding error in `eval(z)`.
    pub fn eval_scale(&self, z: Complexd) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complexd) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Composition `self(inner(z))`.
    pub fn compose(&self, inner: &Polynomial) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| &(&acc * inner) + &Self::constant(c))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complexd::new(0.0, 0.0); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let q = rem[i + dd] / lead;
            quot[i] = q;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * b;
            }
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Drops leading coefficients whose modulus is below `rel_tol` times the
    /// largest coefficient modulus.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let cutoff = rel_tol * self.max_coeff_norm();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Evaluates the reversal `w^n p(1/w)`, `n = degree`, at `w`.
    pub fn eval_reversed(&self, w: Complexd) -> Complexd {
        self.coeffs
            .iter()
            .fold(Complexd::new(0.0, 0.0), |acc, &c| acc * w + c)
    }
}

/// Horner evaluation of `p` at `z`.
pub fn poly_eval(p: &Polynomial, z: Complexd) -> Complexd {
    p.eval(z)
}

pub fn poly_derivative(p: &Polynomial) -> Polynomial {
    p.derivative()
}

pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
    a * b
}

pub fn poly_add(a: &Polynomial, b: &Polynomial) -> Polynomial {
    a + b
}

pub fn poly_pow(a: &Polynomial, k: u32) -> Polynomial {
    a.pow(k)
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})z"),
                _ => format!("({c})z^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complexd::new(0.0, 0.0);
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + rhs.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complexd::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
