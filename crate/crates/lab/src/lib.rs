//! Experiment driver for `sphere-ls`: TOML configs, degree sweeps written to
//! CSV, plot data, and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod describe;
pub mod error;
pub mod oracles;
pub mod plotdata;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::{LabError, LabResult};
