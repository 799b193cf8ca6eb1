use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("not a rare-type configuration: the last block must be the singleton {{n+1}}")]
    NotRareType,

    #[error("invalid hyperparameters: alpha = {alpha}, theta = {theta} (need 0 <= alpha < 1 and theta > -alpha)")]
    InvalidHyperParams { alpha: f64, theta: f64 },

    #[error("samplers require a strictly positive discount, got alpha = {alpha}")]
    ZeroDiscount { alpha: f64 },

    #[error(
        "rising factorial has nonpositive factor {factor} at index {index} (x = {x}, b = {b})"
    )]
    NonpositiveFactor {
        x: f64,
        b: f64,
        index: usize,
        factor: f64,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("database file is empty: {path}")]
    EmptyDatabase { path: String },

    #[error("missing column '{column}' in header of {path}")]
    MissingColumn { column: String, path: String },

    #[error("ragged row at line {line} in {path}: expected {expected} fields, found {found}")]
    RaggedRow {
        path: String,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("parse error at line {line} in {path}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid frequency vector: {0}")]
    InvalidFrequencies(String),

    #[error("assignment violates the class-count constraint: class {class} expected {expected} entries, found {found}")]
    CountConstraint {
        class: usize,
        expected: usize,
        found: usize,
    },

    #[error("partition has no singleton class")]
    NoSingletonClass,

    #[error("instance too large for exhaustive enumeration: {states:.3e} states exceeds bound {bound:.3e}")]
    InstanceTooLarge { states: f64, bound: f64 },

    #[error("maximum-likelihood fit is {reason}; refusing to compute a plug-in value")]
    UnusableMle { reason: &'static str },

    #[error("hyperprior has no mass in the valid parameter region")]
    PriorOutsideRegion,

    #[error("invalid hyperprior: {0}")]
    InvalidPrior(String),

    #[error("degenerate fit range: {0}")]
    DegenerateRange(String),

    #[error("quadrature setup failed: {0}")]
    QuadratureSetup(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    FileRead {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
