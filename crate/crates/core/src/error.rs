//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed network data (shape mismatches, bad indices).
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    /// Malformed partition (empty cluster, overlap, bad coverage).
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// A standing assumption required by the requested analysis fails.
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    /// The requested analysis is defined only for two clusters, or for a
    /// dynamical regime the input is not in.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The coefficient matrix is not Hurwitz, so the Lyapunov equation has
    /// no positive definite solution.
    #[error("Lyapunov equation has no positive definite solution: {0}")]
    LyapunovUnstable(String),

    /// A structural invariant that should hold by construction failed;
    /// signals a broken input graph or a bug.
    #[error("internal invariant failure: {0}")]
    Internal(String),

    /// The integrator produced a non-finite value.
    #[error("integration diverged at step {step}: {what}")]
    Diverged { step: usize, what: String },

    /// Input file could not be parsed against the documented schema.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
