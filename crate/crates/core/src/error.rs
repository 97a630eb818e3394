//! Error types shared across the crate.

use crate::graph::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

/// What went wrong inside the simulation engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaultKind {
    /// A message exceeded the per-edge bandwidth budget.
    BandwidthExceeded { bits: u32, budget: u32 },
    /// Two messages addressed to the same neighbor in one round.
    DuplicateMessage { to: VertexId },
    /// A message addressed to a vertex that is not a neighbor of the sender.
    NotANeighbor { to: VertexId },
    /// A vertex verdict changed away from reject.
    VerdictRegression,
}

impl std::fmt::Display for FaultKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FaultKind::BandwidthExceeded { bits, budget } => {
                write!(f, "message of {bits} bits exceeds the {budget}-bit budget")
            }
            FaultKind::DuplicateMessage { to } => {
                write!(f, "second message to neighbor {to} in one round")
            }
            FaultKind::NotANeighbor { to } => write!(f, "destination {to} is not a neighbor"),
            FaultKind::VerdictRegression => write!(f, "verdict changed away from reject"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("simulation fault at round {round}, vertex {vertex}: {kind}")]
    SimFault {
        round: u64,
        vertex: VertexId,
        kind: FaultKind,
    },

    #[error("simulation fault in trial {trial}: {source}")]
    Trial {
        trial: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("checker contract violation: {0}")]
    ContractViolation(String),

    #[error("instance generation failed after {attempts} attempts: {msg}")]
    GenerationFailed { attempts: u32, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
