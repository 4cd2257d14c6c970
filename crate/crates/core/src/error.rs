use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension {found} is not supported (expected {expected})")]
    Dimension { expected: String, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepSet,

    #[error("qubit slot {0} is out of range")]
    InvalidSlot(usize),

    #[error("cannot parse observable `{0}`")]
    InvalidObservable(String),

    #[error("observable `{0}` cannot be measured with the analysis apparatus")]
    UnsupportedObservable(String),

    #[error("parameter {name} = {value} is outside [0, 1]")]
    ParamOutOfRange { name: &'static str, value: f64 },

    #[error("no value available for term `{0}`")]
    MissingTerm(String),

    #[error("total count for `{0}` is zero")]
    NonPositiveCounts(String),

    #[error("momentum sector {sector} has probability {probability:e}; cannot condition on it")]
    EmptySector { sector: &'static str, probability: f64 },

    #[error("all coincidence counts are zero")]
    AllZeroCounts,

    #[error("unknown tomography projector `{0}`")]
    InvalidProjector(String),

    #[error("filter bandwidth must be positive, got {0} nm")]
    InvalidBandwidth(f64),

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
