//! Truncated series in the free associative algebra on the letters `t`, `A`.
//!
//! A series of truncation degree `N` stores one complex coefficient for each
//! word of length at most `N`, grouped in blocks by length. Words are encoded
//! as bit strings (first letter most significant, `t = 0`, `A = 1`) so that a
//! word of length `d` with code `i` lives at flat index `2^d - 1 + i`.

mod bivariate;
mod derivation;
mod hopf;
mod series;
mod word;

pub use bivariate::{bibracket, divided_difference, BivariateSeries};
pub use derivation::{derivation_of_adseries_residual, exp_derivation_residual, jacobi_residual, Derivation, Substitution};
pub use hopf::{coproduct, grouplike_defect, is_grouplike, is_primitive, primitive_defect, TensorSeries};
pub use series::{ad_series, exp_series_coeffs, TruncatedSeries};
pub use word::{Letter, Word};

/// Largest supported truncation degree.
pub const MAX_CAP: usize = 20;

#[inline]
pub(crate) fn block_offset(d: usize) -> usize {
    (1usize << d) - 1
}

#[inline]
pub(crate) fn series_len(cap: usize) -> usize {
    (1usize << (cap + 1)) - 1
}
