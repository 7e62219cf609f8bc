use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fields are defined on different lattices")]
    LatticeMismatch,

    #[error("mode count {m} out of range 1..={max}")]
    ModeOutOfRange { m: usize, max: usize },

    #[error("time {t} is not a grid node")]
    OffGrid { t: f64 },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid forcing: {0}")]
    Forcing(String),

    #[error("field is not divergence free (relative residual {residual:e})")]
    NotDivergenceFree { residual: f64 },

    #[error("integration failed{} at t = {t}: {reason}", atom.map(|a| format!(" for atom {a}")).unwrap_or_default())]
    Integration {
        t: f64,
        reason: String,
        atom: Option<usize>,
    },

    #[error("pasting junction mismatch (relative {relative:e})")]
    JunctionMismatch { relative: f64 },

    #[error("time step mismatch: {0} vs {1}")]
    StepMismatch(f64, f64),

    #[error("invalid measure: {0}")]
    Measure(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
