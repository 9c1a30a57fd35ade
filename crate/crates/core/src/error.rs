use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration key is missing, unknown, ill-typed or out of range.
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    /// An operation received an argument outside its domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The primary queues are not stable, so the empty probability is undefined.
    #[error("primary queues unstable: lambda_p = {lambda_p} exceeds mu_p = {mu_p}")]
    UnstablePrimary { lambda_p: f64, mu_p: f64 },

    /// Brute-force enumeration refused because the outcome space is too large.
    #[error("enumeration over {m_bands} bands exceeds the limit of {limit}")]
    TooLarge { m_bands: u32, limit: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user input rather than evaluation.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::Json { .. } | Error::Io { .. })
    }
}
