//! IO companion of `steklov-core`: command-line front end, versioned file
//! formats (JSON documents, spectra CSV, VTK legacy, PGM heatmaps, Matrix
//! Market dumps) and reproducible run records.

pub mod cli;
pub mod commands;
pub mod config;
pub mod formats;
pub mod report;

use std::fmt;

/// Error wrapper carrying the exit-code contract:
/// 0 ok, 2 usage, 3 spectral exclusion, 4 numerical failure (1 for IO).
#[derive(Debug)]
pub enum CliError {
    Core(steklov_core::Error),
    Io(std::io::Error),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                steklov_core::Error::InvalidArgument(_)
                | steklov_core::Error::Capacity(_)
                | steklov_core::Error::Geometry(_) => 2,
                steklov_core::Error::SpectralExclusion { .. } => 3,
                steklov_core::Error::Numerical(_) | steklov_core::Error::NonConvergence { .. } => 4,
            },
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<steklov_core::Error> for CliError {
    fn from(e: steklov_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
