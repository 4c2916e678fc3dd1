//! Host-side companion to `rotlabel-core`: file formats, geographic
//! ingestion, synthetic instance generation, SVG snapshots, an evaluation
//! harness, and brute-force reference oracles used by the acceptance suite.
//!
//! The core crate owns the geometry and the solvers; everything here is
//! plumbing that moves instances and schedules in and out of processes.

pub mod bruteforce;
pub mod gen;
pub mod geo;
pub mod harness;
pub mod io;
pub mod staticlab;
pub mod svg;

pub use rotlabel_core as core;

use rotlabel_core::CoreError;

/// Errors from the host-side plumbing. Core solver errors pass through.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
