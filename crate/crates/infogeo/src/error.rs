use thiserror::Error;

/// Errors produced by the numerics, manifold and geometry layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter or function argument left its valid open domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sample lies outside the support of the family.
    #[error("support error: {0}")]
    Support(String),

    /// An SPD factorization failed; the matrix handed in is not positive definite.
    #[error("matrix is not positive definite ({context})")]
    NotPositiveDefinite { context: String },

    /// A quadrature node produced a non-finite integrand value.
    #[error("integrand evaluation failed at x = {abscissa}: {detail}")]
    EvaluationFailure { abscissa: f64, detail: String },

    /// A finite-difference stencil cannot be fit inside the parameter domain.
    #[error("finite-difference stencil leaves the domain on axis {axis}: {detail}")]
    StencilDomain { axis: usize, detail: String },

    /// The requested expectation engine cannot handle this family/integrand.
    #[error("unsupported engine: {0}")]
    UnsupportedEngine(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A built-in cross-check of two algebraic routes disagreed.
    #[error("internal consistency check '{check}' failed (error {error:.3e})")]
    InternalConsistency { check: String, error: f64 },

    #[error("unknown chart '{chart}' for family '{family}'")]
    InvalidChart { chart: String, family: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
