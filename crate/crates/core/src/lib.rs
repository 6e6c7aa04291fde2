//! Physics engine for a parametrically squeezed cavity mode probed by electrons
//! in transit: closed-form kick/energy statistics, a transfer-matrix ODE oracle
//! over the operator basis (x, p, a, a†), and an independent truncated-Fock
//! density-matrix oracle, plus deterministic grid execution helpers.

pub mod analytic;
pub mod checks;
mod error;
pub mod exec;
pub mod fock;
pub mod params;
pub mod propagator;

pub use error::{Error, Result};

/// Complex scalar used throughout the numerical modules.
pub type C64 = num_complex::Complex64;
