use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator has {found} entries, expected {expected}")]
    MalformedOperator { expected: usize, found: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("symbol or kernel belongs to scheme {found}, expected scheme {expected}")]
    SchemeMismatch { expected: u64, found: u64 },

    #[error("invalid angular momentum arguments: {0}")]
    InvalidAngularMomentum(String),

    #[error("angular grid too coarse for j = {j}: need n_alpha >= {min_alpha} and n_beta >= {min_beta}")]
    GridTooCoarse { j: String, min_alpha: usize, min_beta: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e} ({detail})")]
    NotConverged { estimate: f64, tolerance: f64, detail: String },

    #[error("evolution produced non-finite values at step {step}; the step is too large")]
    EvolutionDiverged { step: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
