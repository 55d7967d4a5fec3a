use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An index or collision count lies outside its allowed range.
    #[error("range error: {0}")]
    Range(String),

    /// A state vector is too far from unit norm to be renormalized.
    #[error("normalization error: state norm {norm} deviates from 1 by more than {tolerance}")]
    Normalization { norm: f64, tolerance: f64 },

    /// Post-selection on an outcome that has (numerically) zero probability.
    #[error(
        "degenerate outcome: post-selection norm factor {norm_factor:e} is below {threshold:e}"
    )]
    DegenerateOutcome { norm_factor: f64, threshold: f64 },

    /// Measurement basis does not match the number of ancillas it is applied to.
    #[error("basis has {got} angle pairs but {expected} ancillas were measured")]
    BasisLength { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
