//! Numerics for the universal elliptic KZB connection.
//!
//! The crate is layered:
//!
//! * [`nca`] truncated series in the free algebra on two letters `t`, `A`,
//!   derivations, coproduct and grading helpers.
//! * [`specfun`] Jacobi theta, the Kronecker function, Eisenstein functions
//!   and series, and residual checks for their classical identities.
//! * [`kzb`] the connection operators, curvature, quasi-periodicity and
//!   modular checks, twists.
//! * [`transport`] parallel transport along piecewise linear paths.
//! * [`ratstruct`] the gauge to Weierstrass form and the algebraic frame.

pub mod error;
pub mod kzb;
pub mod nca;
pub mod ratstruct;
pub mod specfun;
pub mod transport;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

/// `2 pi i`.
pub const TWO_PI_I: C64 = C64::new(0.0, std::f64::consts::TAU);
