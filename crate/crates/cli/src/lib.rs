//! Config-driven circuit-QED experiments.
//!
//! `baseline`, `chevron`, `readout` and `spectrum` each read an
//! [`ExperimentConfig`](config::ExperimentConfig) and emit column tables plus
//! a JSON summary that echoes the resolved configuration.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod spectral;

pub use config::ExperimentConfig;
pub use error::CliError;
