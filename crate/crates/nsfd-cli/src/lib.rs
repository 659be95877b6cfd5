//! Experiment harness for the NSFD integrators: configuration manifests,
//! CSV time-series output, method comparison, convergence measurement, and
//! a randomized property suite.

use std::fmt;

pub mod commands;
pub mod config;
pub mod csvio;
pub mod runner;

/// Harness-level errors. Exit-code mapping: configuration and IO problems
/// exit 1, a trajectory that becomes non-finite exits 2 (reported through
/// the run summary, not this type), and property violations exit 3.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Io(String),
    Step { step: u64, message: String },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Step { step, message } => write!(f, "step {step} failed: {message}"),
        }
    }
}

impl std::error::Error for CliError {}
