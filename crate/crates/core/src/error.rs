use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precision of {0} bits is outside the supported range 53..=4096")]
    Precision(u32),

    #[error("requested order {requested} exceeds the limit {limit}")]
    OrderLimit { requested: usize, limit: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("inconsistent composition coefficients: {0}")]
    Consistency(String),

    #[error("constraint matrix is rank deficient: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("constraint block on the extra stages is singular; extra slopes are not determined")]
    SingularSubmatrix,

    #[error("tableau is not monoimplicit: {0}")]
    NotMonoimplicit(String),

    #[error("nonlinear solve did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("problem has no {0}")]
    MissingStructure(&'static str),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the root cause is a failed nonlinear solve.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NonConvergence { .. } => true,
            Error::AtStep { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}
