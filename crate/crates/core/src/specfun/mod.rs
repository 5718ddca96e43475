//! Jacobi theta, Eisenstein functions and series, the Kronecker function
//! and residual checks for their classical identities.
//!
//! Conventions: `q = exp(2 pi i tau)`, `z = exp(2 pi i xi)`; the square
//! roots `q^{1/8}` and `z^{1/2}` are `exp(2 pi i tau / 8)` and
//! `exp(pi i xi)`. Nothing is reduced to a fundamental domain before
//! evaluation, so the shift identities are genuine checks.

mod cache;
mod identities;
mod point;
mod tables;

pub use cache::EisensteinCache;
pub use identities::{
    e1_shift_residuals, fay_residual, heat_residual, kronecker_shift_residuals, modularity_residual,
};
pub use point::{lattice_distance, ModularPoint, Sl2, TorusPoint};

use crate::{Result, C64};

/// Numerical guards shared by all evaluations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecfunConfig {
    /// Smallest accepted `Im(tau)`.
    pub min_im_tau: f64,
    /// Points closer than this to the lattice are rejected.
    pub pole_floor: f64,
    /// Relative size below which q-series terms are dropped.
    pub q_tol: f64,
}

impl Default for SpecfunConfig {
    fn default() -> Self {
        SpecfunConfig { min_im_tau: 0.05, pole_floor: 1e-6, q_tol: 1e-18 }
    }
}

/// `theta(xi, tau)` from the Jacobi product.
pub fn theta(p: &TorusPoint, c: &EisensteinCache) -> Result<C64> {
    c.check_point(p)?;
    c.theta(p.xi)
}

/// `E_1 = theta'/theta`.
pub fn log_theta_dxi(p: &TorusPoint, c: &EisensteinCache) -> Result<C64> {
    c.check_point(p)?;
    c.e1(p.xi)
}

/// Eisenstein series `e_k(tau)` (zero for odd `k`).
pub fn eisenstein_e(k: usize, c: &EisensteinCache) -> Result<C64> {
    c.e(k)
}

/// Eisenstein function `E_k(xi, tau)`.
pub fn eisenstein_big_e(k: usize, p: &TorusPoint, c: &EisensteinCache) -> Result<C64> {
    c.check_point(p)?;
    Ok(c.big_e_all(p.xi, k)?[k])
}

/// Weierstrass `wp = E_2 - e_2`.
pub fn weierstrass_p(p: &TorusPoint, c: &EisensteinCache) -> Result<C64> {
    c.check_point(p)?;
    c.wp(p.xi)
}

pub fn kronecker_f(p: &TorusPoint, alpha: C64, c: &EisensteinCache) -> Result<C64> {
    c.check_point(p)?;
    c.kronecker_f(p.xi, alpha)
}

pub fn kronecker_f2prime(p: &TorusPoint, alpha: C64, c: &EisensteinCache) -> Result<C64> {
    c.check_point(p)?;
    c.kronecker_f2prime(p.xi, alpha)
}

/// Taylor coefficients `g_0..g_n` of `alpha F(xi, alpha)` in `alpha`.
pub fn g_coefficients(p: &TorusPoint, c: &EisensteinCache, n: usize) -> Result<Vec<C64>> {
    c.check_point(p)?;
    c.g_coefficients(p.xi, n)
}
