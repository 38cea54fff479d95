use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gimbal lock: pitch {theta} rad too close to +/-pi/2")]
    GimbalLock { theta: f64 },

    #[error("table error: {0}")]
    Table(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("singular inflow: mass-flow parameter vanishes")]
    SingularInflow,

    #[error("undefined wake skew: in-plane and normal flow both zero")]
    UndefinedSkew,

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("{source_tag}: {inner}")]
    Component {
        source_tag: &'static str,
        inner: Box<Error>,
    },

    #[error("trim did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("control channel {channel} saturated at {value:.3}%")]
    Saturation { channel: &'static str, value: f64 },

    #[error("non-finite residual while probing column {column}")]
    Probe { column: usize },

    #[error("E matrix singular (condition estimate {condition:e})")]
    Extraction { condition: f64 },

    #[error("riccati solver: {0}")]
    Riccati(String),

    #[error("infeasible set-point: block matrix rank {rank} of {size}")]
    InfeasibleSetPoint { rank: usize, size: usize },

    #[error("divergence at t={time:.3}s in phase {phase}: {reason}")]
    Divergence {
        time: f64,
        phase: String,
        reason: String,
    },

    #[error("mission failure: {0}")]
    Mission(String),
}

impl Error {
    pub(crate) fn tagged(self, source_tag: &'static str) -> Error {
        Error::Component {
            source_tag,
            inner: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
