//! Hybrid finite-difference / finite-volume schemes for hyperbolic
//! conservation laws.
//!
//! Both cell averages and face values are evolved: averages by an exact flux
//! difference, face values by one-sided discrete differential operators that
//! mix the two kinds of data. The crate also carries the linear stability
//! analysis of those operators, a second-order MUSCL finite-volume baseline,
//! and the benchmark problems used to compare them.

#![allow(clippy::needless_range_loop)]

pub mod ddo;
pub mod fvm_reference;
pub mod harness;
pub mod physics;
pub mod solver1d;
pub mod solver2d;
pub mod stability;
pub mod time_integration;

use std::path::PathBuf;

/// Errors surfaced by the harness and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ddo(#[from] ddo::DdoError),
    #[error(transparent)]
    Stability(#[from] stability::StabilityError),
    #[error(transparent)]
    Solver(#[from] solver1d::SolverError),
    #[error(transparent)]
    Rk(#[from] time_integration::UnknownScheme),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no exact or reference solution available: {0}")]
    MissingExact(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_blow_up(&self) -> bool {
        matches!(self, Error::Solver(e) if e.is_blow_up())
    }

    /// Process exit status: 3 for a numerical blow-up, 1 for I/O failures,
    /// 2 for everything the caller could fix in its input.
    pub fn exit_code(&self) -> i32 {
        if self.is_blow_up() {
            3
        } else if matches!(self, Error::Io { .. }) {
            1
        } else {
            2
        }
    }
}
