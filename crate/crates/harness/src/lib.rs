//! Experiment runner, certificate sweeps and quadratic reports built on
//! `fracgd`. The `fracgd` binary wraps these with a command line.

pub mod certify;
pub mod config;
mod error;
pub mod experiment;
pub mod output;
pub mod plot;
pub mod report;

pub use error::{HarnessError, Result};
