// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("matrix is not symmetric: max |H_ij - H_ji| = {0:e}")]
    NotSymmetric(f64),

    #[error("eigensolver failed to converge")]
    EigenNonConvergence,

    #[error("invalid bath: {0}")]
    InvalidBath(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("non-finite state at t = {t:e}")]
    NonFinite { t: f64 },

    #[error("maximum step count {max_steps} exceeded at t = {t:e}")]
    MaxStepsExceeded { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("invariant violated at t = {t:e}: {what}")]
    InvariantViolation { t: f64, what: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvariantViolation { .. }
            | Error::NonFinite { .. }
            | Error::MaxStepsExceeded { .. }
            | Error::StepUnderflow { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
