//! Batch driver: reads a run configuration, runs one command and writes
//! deterministic CSV/JSON files.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command, Overrides};
pub use config::RunConfig;
pub use error::CliError;
