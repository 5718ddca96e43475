use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation mismatch: {left} vs {right}")]
    CapMismatch { left: usize, right: usize },

    #[error("truncation degree {0} is out of range (max {max})", max = crate::nca::MAX_CAP)]
    CapTooLarge(usize),

    #[error("invalid word {0:?}: only letters 't' and 'A' are allowed")]
    InvalidWord(String),

    #[error("word {word:?} is longer than the truncation degree {cap}")]
    WordTooLong { word: String, cap: usize },

    #[error("duplicate word {0:?} in series data")]
    DuplicateWord(String),

    #[error("{0}")]
    NonZeroConstant(String),

    #[error("Im(tau) = {0} is not positive")]
    Divergence(f64),

    #[error("Im(tau) = {im} is below the configured floor {floor}")]
    TauTooLow { im: f64, floor: f64 },

    #[error("point {what} = {re}{im:+}i lies within {dist:.3e} of the lattice")]
    Pole { what: &'static str, re: f64, im: f64, dist: f64 },

    #[error("Eisenstein cache holds k <= {have}, but k = {need} was requested")]
    CacheCapacity { have: usize, need: usize },

    #[error("matrix [[{a}, {b}], [{c}, {d}]] is not in SL2(Z)")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("iteration did not converge: {0}")]
    NonConvergent(String),

    #[error("discriminant is numerically zero (|Delta| = {0:.3e})")]
    SingularFrame(f64),

    #[error("unsupported index k = {0}")]
    UnsupportedIndex(usize),

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// True for errors caused by hitting a numerical guard (pole, singular
    /// frame, divergent series) rather than by malformed input.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. }
                | Error::Divergence(_)
                | Error::TauTooLow { .. }
                | Error::SingularFrame(_)
                | Error::NonConvergent(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
