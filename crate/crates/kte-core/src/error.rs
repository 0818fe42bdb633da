use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cost spec: {0}")]
    InvalidSpec(String),

    #[error("expression parse error: {0}")]
    Parse(String),

    #[error("point outside table domain: |x| reaches {reached}, table covers {covered}")]
    OutOfDomain { reached: f64, covered: f64 },

    #[error("cost is not superlinear: {0}")]
    NotSuperlinear(String),

    #[error("Young-function scan diverged (two-sided Δ₂ condition fails): {0}")]
    Delta2Violation(String),

    #[error("derivative order violated: p+ = {p_plus} < p- = {p_minus}")]
    InvalidOrder { p_plus: f64, p_minus: f64 },

    #[error("sublevel set is unbounded within the table")]
    Unbounded,

    #[error("problem size {m}x{k} exceeds the desk-scale limit of {limit} cost entries")]
    SizeLimit { m: usize, k: usize, limit: usize },

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
