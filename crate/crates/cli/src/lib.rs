//! Batch driver: identity suites, Monte Carlo covariance experiments and
//! prediction tables, each producing a self-describing report.

pub mod config;
pub mod run;

pub use config::{ConfigError, ExperimentConfig, Format, Mode};
pub use run::{run, write_atomic, Gate, Report, Results, RunError, EXIT_FAIL, EXIT_INVALID, EXIT_PASS};
