use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported quadrature degree {requested} (supported up to {max})")]
    UnsupportedDegree { requested: usize, max: usize },

    /// A polynomial mass matrix whose conditioning exceeds the admissible bound.
    #[error("ill-conditioned mass matrix (condition estimate {condition:.3e})")]
    IllConditionedMass { condition: f64 },

    #[error("degenerate element {element}: mass matrix condition estimate {condition:.3e}")]
    DegenerateElement { element: usize, condition: f64 },

    #[error("interior block of element {element} is not positive definite")]
    LocalFactorization { element: usize },

    #[error("matrix is not symmetric positive definite (Cholesky breakdown)")]
    NotPositiveDefinite,

    #[error("conjugate gradients did not converge: {iterations} iterations, relative residual {residual:.3e}")]
    CgNotConverged { iterations: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mesh format error on line {line}: {message}")]
    MeshFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
