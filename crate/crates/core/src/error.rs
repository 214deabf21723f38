use thiserror::Error;

/// Errors raised by model evaluation, fitting, and scenario loading.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unstable queue `{buffer}`: service rate {service_rate} must exceed arrival rate {arrival_rate}")]
    UnstableQueue {
        buffer: String,
        arrival_rate: f64,
        service_rate: f64,
    },

    #[error("remote inference requested but no edge server is configured")]
    NoEdgeConfigured,

    #[error("no AoI updates to average")]
    EmptyUpdates,

    #[error("average AoI {0} is not positive; RoI is undefined")]
    DegenerateAoi(f64),

    #[error("design matrix is rank deficient (column `{column}` is linearly dependent)")]
    RankDeficient { column: String },

    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("scenario has {0} validation error(s)")]
    InvalidScenario(usize),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
