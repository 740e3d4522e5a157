use thiserror::Error;

/// Errors produced by the simulator, controller and tooling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    /// Attitude too close to the Euler singularity (cos(phi)*cos(theta) -> 0).
    #[error("attitude near the Euler singularity (|phi| or |theta| too close to pi/2)")]
    Singularity,

    /// A numerical quantity left the finite range during integration.
    #[error("simulation diverged at t = {t} s")]
    Diverged { t: f64 },

    #[error("control allocation infeasible: {0}")]
    AllocationInfeasible(String),

    /// Invalid configuration; `key` names the offending entry.
    #[error("invalid config: {key}: {message}")]
    Config { key: String, message: String },

    #[error("telemetry schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Process exit code convention: 2 config/schema, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Schema(_) => 2,
            Error::NonFinite(_)
            | Error::Domain(_)
            | Error::Singularity
            | Error::Diverged { .. }
            | Error::AllocationInfeasible(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
