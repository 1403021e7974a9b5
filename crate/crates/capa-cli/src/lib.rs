//! Experiment runner over the aperture-array analysis library: quadrature
//! cross-checks, rate/capacity sweeps, capacity regions, and the
//! verification suites, all emitting CSV or a plain-text report.
//!
//! File formats are documented in `docs/FORMATS.md`.

pub mod commands;
pub mod config;
pub mod error;
pub mod rows;

pub use commands::{
    cmd_gain, cmd_region, cmd_sweep_aperture, cmd_sweep_occupancy, cmd_verify, VerifyOutcome,
};
pub use config::{parse_config, ExperimentConfig};
pub use error::CmdError;
