use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not symmetric (max relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite: pivot {pivot} is {value:.6e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is ill-conditioned (condition estimate {estimate:.3e} exceeds 1e12)")]
    IllConditioned { estimate: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate costs: c11 == c12 or c21 == c22")]
    DegenerateCost,

    #[error("degenerate geometry: the score does not depend on the inverted coordinate")]
    DegenerateGeometry,

    #[error("Jacobian vanishes at x1 = {x1}, x2 = {x2} (point lies on the fold)")]
    Singularity { x1: f64, x2: f64 },

    #[error("density grid does not cover the data: {0}")]
    Coverage(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("trial failed (p = {p}, n = {n}, trial = {trial}): {source}")]
    Trial {
        p: usize,
        n: usize,
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
