//! Reproducible experiments on the periodic viscous Hamilton–Jacobi equation.
//!
//! Configuration, seeded source ensembles, solution directories with
//! regularity reports and superlevel curves, audits of the Bernstein
//! machinery, and the radial counterexample tables. The `hjlab` binary is a
//! thin command-line layer over [`commands`].

pub mod commands;
pub mod config;
pub mod manifest;
pub mod report;
pub mod runner;
pub mod source;

use hjlab_core::bernstein::BernsteinError;
use hjlab_core::counterexample::CounterexampleError;
use hjlab_core::solver::SolveError;
use thiserror::Error;

pub use config::{DeltaPolicy, KGridSpec, RunConfig};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("solver failure: {0}")]
    Divergence(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    /// 2 for configuration and domain errors, 3 for solver failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Domain(_) => 2,
            Self::Divergence(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl From<SolveError> for LabError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Config(_) => Self::Config(e.to_string()),
            SolveError::Field(_) | SolveError::Domain(_) => Self::Domain(e.to_string()),
            SolveError::Divergence { .. } | SolveError::NonConvergence { .. } => {
                Self::Divergence(e.to_string())
            }
            SolveError::Io(msg) => Self::Io(msg),
        }
    }
}

impl From<BernsteinError> for LabError {
    fn from(e: BernsteinError) -> Self {
        match e {
            BernsteinError::Solve(inner) => inner.into(),
            other => Self::Domain(other.to_string()),
        }
    }
}

impl From<CounterexampleError> for LabError {
    fn from(e: CounterexampleError) -> Self {
        Self::Domain(e.to_string())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}
