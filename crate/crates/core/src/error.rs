use thiserror::Error;

/// Everything that can go wrong while computing invariants.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point violates the manifold constraint: {0}")]
    Constraint(String),

    #[error("manifold mismatch: {0}")]
    ManifoldMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("wrong singularity type: {0}")]
    SingularityType(String),

    #[error("small divisor {divisor:e} in the homological equation at degree {degree}")]
    Degeneracy { degree: usize, divisor: f64 },

    #[error("near-degenerate parameters: {0}")]
    NearDegenerate(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("fit accuracy: {0}")]
    Accuracy(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("inconsistent twisting index: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by parameters sitting on a degeneracy locus.
    pub fn is_near_degenerate(&self) -> bool {
        matches!(self, Error::NearDegenerate(_))
    }
}
