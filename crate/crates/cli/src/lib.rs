//! Experiment drivers over the numerical core: strict config parsing,
//! parallel ensemble execution, and deterministic CSV / JSON / SVG artifacts.

pub mod config;
pub mod csvio;
pub mod experiments;
pub mod mc;
pub mod parallel;
pub mod summary;
pub mod svg;

use std::fmt;

/// Error taxonomy mapped onto process exit codes:
/// config → 2, numerical → 3, I/O → 4.
#[derive(Debug)]
pub enum CliError {
    Config(config::ConfigError),
    Numerical(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<pathint_core::sde::SdeError> for CliError {
    fn from(e: pathint_core::sde::SdeError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<pathint_core::mppi::PiError> for CliError {
    fn from(e: pathint_core::mppi::PiError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<pathint_core::foc::FocError> for CliError {
    fn from(e: pathint_core::foc::FocError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<pathint_core::mgh::MghError> for CliError {
    fn from(e: pathint_core::mgh::MghError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<pathint_core::path_integral::PathIntegralError> for CliError {
    fn from(e: pathint_core::path_integral::PathIntegralError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<pathint_core::strategies::StrategyError> for CliError {
    fn from(e: pathint_core::strategies::StrategyError) -> Self {
        CliError::Numerical(e.to_string())
    }
}
