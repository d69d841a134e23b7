//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors produced by geometry, meshing, assembly and the spectral solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    InvalidArgument(String),
    /// A size limit was exceeded (generation cap, mesh cell budget).
    Capacity(String),
    /// The polygon cannot be meshed (off-grid or non-axis-aligned boundary).
    Geometry(String),
    /// The shift `k` hits (or is too close to) the excluded discrete spectrum,
    /// so the interior operator is singular.
    SpectralExclusion { k: f64, detail: String },
    /// A linear-algebra kernel failed (zero pivot, refinement stall, ...).
    Numerical(String),
    /// The eigensolver did not reach the requested residual tolerance.
    NonConvergence {
        requested: usize,
        converged: usize,
        detail: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Capacity(msg) => write!(f, "capacity exceeded: {msg}"),
            Error::Geometry(msg) => write!(f, "geometry error: {msg}"),
            Error::SpectralExclusion { k, detail } => {
                write!(f, "spectral exclusion at k = {k}: {detail}")
            }
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::NonConvergence {
                requested,
                converged,
                detail,
            } => write!(
                f,
                "eigensolver converged {converged}/{requested} pairs: {detail}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
