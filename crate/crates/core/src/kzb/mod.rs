//! The universal KZB connection `nabla = d + Omega_xi dxi + Omega_tau dtau`
//! on the truncated free algebra, with operator-valued coefficients.
//!
//! `Omega_xi` is left multiplication by `-G(ad_t)(A)` where
//! `G(alpha) = alpha F(xi, alpha)`; `Omega_tau` is left multiplication by
//! `-(1/2 pi i) (G' - (G - 1)/alpha)(ad_t)(A)` plus the derivations `psi_A`
//! and `psi_t`. Laurent poles in `ad_t` never appear.

mod checks;
mod form;
mod operator;

pub use checks::{
    curvature_residual, curvature_residual_with, mc_residual, quasi_periodicity_residuals, sl2_residual,
    QuasiPeriodicity,
};
pub use form::{nu_section, AffineSection, ConnForm, FnSection, FormEval, Kzb, Omega, Section, TauSeries};
pub use operator::ConnOperator;
