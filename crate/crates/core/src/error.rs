use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid observation at slot {slot}: {reason}")]
    InvalidObservation { slot: usize, reason: String },

    #[error("placement {node} out of range for {node_count} nodes")]
    PlacementOutOfRange { node: usize, node_count: usize },

    #[error("{name} must be nonnegative, got {value}")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("invalid policy configuration: {0}")]
    InvalidPolicyConfig(String),

    #[error("enumeration of {size} candidate sequences exceeds the limit of {limit}")]
    EnumerationTooLarge { size: u128, limit: u128 },

    #[error("no placement sequence satisfies the budget")]
    Infeasible,

    #[error("invalid predictor: {0}")]
    InvalidPredictor(String),

    #[error("invalid trace: {0}")]
    Trace(String),

    #[error("trace file {path}: {reason}")]
    TraceFile { path: PathBuf, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("config file {path}: {reason}")]
    ConfigFile { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures caused by the configuration (parsing, unknown keys, bad values).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::ConfigFile { .. }
                | Error::InvalidPolicyConfig(_)
                | Error::InvalidPredictor(_)
                | Error::InvalidScenario(_)
        )
    }

    /// True for failures caused by a malformed mobility trace.
    pub fn is_trace(&self) -> bool {
        matches!(self, Error::Trace(_) | Error::TraceFile { .. } | Error::Csv(_))
    }
}
