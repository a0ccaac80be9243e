//! Experiment runner for ergonomic handover-point optimization: configuration,
//! parallel sweeps and training campaigns, baseline comparison and result
//! files.

pub mod artifacts;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod runner;

pub use config::{BudgetSpec, ExperimentConfig, Overrides};
pub use error::HarnessError;
