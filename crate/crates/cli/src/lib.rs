//! Command-line front end for the precoder simulations: TOML config, sweep
//! commands writing CSV, an SVG chart and a run manifest, and the invariant
//! suite.

pub mod commands;
pub mod config;
pub mod svg;

use std::fmt;

use ostbc_precoder::Error as CoreError;

pub use commands::{run, Command, Run};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(CoreError),
    #[error("invariant failure:\n{0}")]
    Invariant(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(key: &str, reason: impl fmt::Display) -> Self {
        CliError::Config(format!("`{key}`: {reason}"))
    }

    /// Parameter errors are reported against the config; everything else is a
    /// numerical failure.
    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { name, reason } => CliError::config(name, reason),
            CoreError::UnknownCode(_) => CliError::config("code", e),
            other => CliError::Numerical(other),
        }
    }

    /// 1 config (and unusable output directory), 2 numerical, 3 invariant.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}
