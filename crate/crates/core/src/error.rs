use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = SrtError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SrtError {
    /// A scenario or run parameter violates its invariant. `key` names the
    /// parameter using the CLI / config-file spelling.
    #[error("invalid value for `{key}`: {reason}")]
    InvalidParam { key: String, reason: String },

    /// Unknown key in a configuration file.
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Input the math is undefined for (e.g. an all-zero channel vector).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Caller broke an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("subset enumeration refused for {0} relays (limit is {max})", max = crate::analytic::MAX_ENUMERATED_RELAYS)]
    TooManyRelays(usize),

    /// The closed-form relay intercept oracle needs identical relay→eavesdropper
    /// variances.
    #[error("relay intercept closed form needs uniform relay-eavesdropper variances; use Monte Carlo")]
    HeterogeneousWiretap,

    #[error("failed to write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SrtError {
    pub(crate) fn param(key: &str, reason: impl Into<String>) -> Self {
        SrtError::InvalidParam {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}
