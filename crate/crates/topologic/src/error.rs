use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("world ({point}, open #{open}) is not a world of this model")]
    InvalidWorld { point: String, open: usize },

    #[error("the space is not a topology: {0}")]
    NotATopology(String),

    #[error("splitting family is not valid: {0}")]
    InvalidSplitting(String),

    #[error("basis conditions violated: {0}")]
    InvalidBasis(String),

    #[error("frame conditions violated: {0}")]
    FrameConditionsViolated(String),

    #[error("scheme instantiation error: {0}")]
    SchemeInstantiation(String),

    #[error("search cap exceeded: {0}")]
    CapExceeded(String),

    #[error("search budget exhausted after {models_examined} models")]
    BudgetExhausted { models_examined: u64 },

    #[error("rewriting step limit reached: {message}\ntrace:\n{trace}")]
    RewriteLimit { message: String, trace: String },

    #[error("normal form failed verification: {0}")]
    DnfVerificationFailed(String),

    #[error("characterization mismatch for atom {atom}: set-theoretic {set_based:?} vs formula-based {formula_based:?}")]
    CharacterizationMismatch {
        atom: String,
        set_based: String,
        formula_based: String,
    },

    #[error("valuation value for atom {0} is not a fixed point of both I and C")]
    ValuationNotClopen(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
