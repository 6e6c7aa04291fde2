use thiserror::Error;

/// Unified error type for the physics engine.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input failed a physical validity bound; names the offending field.
    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },

    /// An argument left the domain where a formula is numerically meaningful.
    #[error("out of range: {0}")]
    Range(String),

    /// The adaptive integrator could not proceed.
    #[error("integration failed at t = {t}: {message}")]
    Integration { t: f64, message: String },

    /// Fock-space truncation too small for the requested state or evolution.
    #[error("truncation failure: {0}")]
    Truncation(String),

    /// A density matrix lost trace, Hermiticity, or positivity.
    #[error("state integrity violated: {0}")]
    StateIntegrity(String),

    /// Moments and transfer matrix use different operator orderings.
    #[error("ordering convention mismatch: {0}")]
    Convention(String),
}

pub type Result<T> = std::result::Result<T, Error>;
