//! Damped Traub root-finding iterations studied as rational maps of the
//! Riemann sphere: map evaluation, fixed points and critical points,
//! basin rendering, parameter planes, and a numerical verification suite.

pub mod basins;
pub mod colour;
pub mod maps;
pub mod paramplane;
pub mod poly;
pub mod sphere;
pub mod verify;

pub use poly::{Complexd, Polynomial, RationalMap};
pub use sphere::{chordal, SpherePoint};
