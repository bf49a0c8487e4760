use thiserror::Error;

/// Errors raised by the numerical kernels, the solver and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters outside the region where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Index-ordered evaluations of a matrix element disagree.
    #[error("matrix asymmetry at ({row}, {col}): mismatch {mismatch:.3e} exceeds {tolerance:.3e}")]
    Asymmetry {
        row: usize,
        col: usize,
        mismatch: f64,
        tolerance: f64,
    },

    /// The eigen decomposition produced non-finite or unusable output.
    #[error("eigen decomposition failed: {0}")]
    Convergence(String),

    /// No admissible bracket could be established.
    #[error("bracketing failed: {0}")]
    Bracket(String),

    /// The shooting integration blew up before reaching the matching point.
    #[error("stiff integration: {0}")]
    Stiffness(String),

    /// An infinite series was requested outside its convergence region.
    #[error("divergent series: {0}")]
    Divergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
