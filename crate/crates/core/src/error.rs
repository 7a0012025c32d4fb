use thiserror::Error;

use crate::localsearch::DualCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("{count} job(s) still unassigned (first: {first})")]
    UnassignedJobs { count: usize, first: usize },

    #[error("variant precondition failed: {0}")]
    VariantPrecondition(String),

    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("iteration cap of {limit} exceeded")]
    IterationCap { limit: u64 },

    #[error("numerical failure in master LP: {0}")]
    Numerical(String),

    /// The local search found no potential move at a target where the
    /// configuration LP is feasible. The attached certificate is what the
    /// search produced; `certificate_verified` says whether the exact dual
    /// check accepted it (which would contradict the LP verdict).
    #[error("local search stuck at feasible target T={target} (certificate verified: {certificate_verified})")]
    StuckAtFeasible {
        target: u64,
        certificate: Box<DualCertificate>,
        certificate_verified: bool,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 bad input, 3 guard or cap, 4 internal
    /// inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInstance(_)
            | Error::InvalidSchedule(_)
            | Error::UnassignedJobs { .. }
            | Error::VariantPrecondition(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::GuardExceeded(_) | Error::IterationCap { .. } => 3,
            Error::StuckAtFeasible { .. } | Error::Numerical(_) | Error::Invariant(_) | Error::Contract(_) => 4,
        }
    }
}
