//! Parallel transport for `nabla = d + omega` by Picard iteration.
//!
//! Fiber transport solves `d phi = -nu_xi phi dxi` at fixed `tau` along a
//! polyline. Family transport moves along `tau` between two sections and
//! solves `d phi/d tau + nu_{sigma1} phi - phi nu_{sigma2} + psi(phi) = 0`.
//! Both start from `phi = 1` unless an initial value is given.

mod checks;
mod path;
mod quadrature;
mod solver;

pub use checks::{homotopy_invariance_check, lattice_conjugation_check, puncture_monodromy, LatticeShift};
pub use path::{transport, transport_family_from, transport_fiber_from, FamilyTerms, PathSpec, TransportResult};
pub use quadrature::Rule;
pub use solver::TransportOptions;
