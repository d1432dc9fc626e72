use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rate law: {0}")]
    InvalidLaw(String),

    #[error("{what} out of domain: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("label {label} outside stored window [{lo}, {hi}]")]
    OutOfWindow { label: i64, lo: i64, hi: i64 },

    #[error("time {requested} has not been simulated (run is at {now})")]
    Unsimulated { requested: f64, now: f64 },

    #[error("coupled runs have incompatible windows: {0}")]
    WindowMismatch(String),

    #[error("window audit failed: {0}")]
    WindowAudit(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}
