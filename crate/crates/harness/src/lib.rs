//! Experiment harness: TOML configs, the run matrix, CSV and SVG output, and
//! the zero-sum replication study.

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod plot;
pub mod study;

pub use config::{parse_config, parse_config_str, ExperimentConfig, Overrides};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment_matrix, Row, RunRecord};
