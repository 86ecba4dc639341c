//! Error types shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid geometry: ring needs at least 3 emitters, got {n_ring}")]
    InvalidGeometry { n_ring: u32 },

    #[error("mode index {mode} out of range for ring of {n_ring} emitters")]
    ModeIndexOutOfRange { mode: i64, n_ring: u32 },

    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid frequency {omega}: transition frequency must be > 0")]
    InvalidFrequency { omega: f64 },

    #[error("invalid temperature {temperature}: must be > 0")]
    InvalidTemperature { temperature: f64 },

    #[error("invalid rate {name} = {value}: rates must be finite and >= 0")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("invalid level ladder: {reason}")]
    InvalidLadder { reason: String },

    #[error("invalid population state: {reason}")]
    InvalidPopulation { reason: String },

    #[error("invalid time grid: {reason}")]
    InvalidTimeGrid { reason: String },

    #[error("numeric error: {reason}")]
    Numeric { reason: String },

    #[error("integration failure at t*gamma_plus = {time}: {reason}")]
    IntegrationFailure { time: f64, reason: String },

    #[error("positivity violation at t*gamma_plus = {time}: population {index} = {value}")]
    PositivityViolation { time: f64, index: usize, value: f64 },

    #[error("steady state is not unique: {reason}")]
    NonUniqueSteadyState { reason: String },

    #[error("population imbalance undefined: {reason}")]
    UndefinedImbalance { reason: String },

    #[error("normalization error: no baseline row for {axis}")]
    MissingBaseline { axis: String },

    #[error("sweep failed: every point errored (first: {first})")]
    SweepAllPointsFailed { first: String },

    #[error("config error in [{section}] {key}: {message}")]
    Config {
        section: String,
        key: String,
        message: String,
    },
}

impl Error {
    /// Stable machine-readable code for CLI error lines and sweep row annotations.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGeometry { .. } => "invalid-geometry",
            Error::ModeIndexOutOfRange { .. } => "mode-index-out-of-range",
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::InvalidFrequency { .. } => "invalid-frequency",
            Error::InvalidTemperature { .. } => "invalid-temperature",
            Error::InvalidRate { .. } => "invalid-rate",
            Error::InvalidLadder { .. } => "invalid-ladder",
            Error::InvalidPopulation { .. } => "invalid-population",
            Error::InvalidTimeGrid { .. } => "invalid-time-grid",
            Error::Numeric { .. } => "numeric",
            Error::IntegrationFailure { .. } => "integration-failure",
            Error::PositivityViolation { .. } => "positivity",
            Error::NonUniqueSteadyState { .. } => "non-unique-steady-state",
            Error::UndefinedImbalance { .. } => "undefined-imbalance",
            Error::MissingBaseline { .. } => "missing-baseline",
            Error::SweepAllPointsFailed { .. } => "sweep-all-points-failed",
            Error::Config { .. } => "config",
        }
    }
}
