//! Command-line front end for the cavity-photon detection engine: config
//! ingestion, four commands (analytic, simulate, validate, sweep), and
//! deterministic CSV/SVG emission.

pub mod commands;
pub mod config;
pub mod csv;
pub mod svg;
