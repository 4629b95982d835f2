use thiserror::Error;

use crate::partition::Partition;

/// Errors raised by the library.
///
/// Resource errors (`CapExceeded`) are kept distinct from structural ones so
/// front ends can map them to their own exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("{what} exceeds cap of {cap}")]
    CapExceeded { what: &'static str, cap: u128 },

    #[error("partition is not invariant under generator {generator}")]
    NotInvariant { generator: usize },

    #[error("generator {generator} of the subgroup is not a member of the group")]
    NotSubgroup { generator: usize },

    #[error("group is not transitive")]
    NotTransitive,

    #[error("poset relation contains a cycle through {0}")]
    PosetCycle(String),

    #[error("ground sets differ")]
    GroundSetMismatch,

    #[error("unknown poset element {0:?}")]
    UnknownElement(String),

    #[error("not an orthogonal block structure: {0}")]
    NotObs(ObsViolation),

    #[error("lattice is not distributive")]
    NotDistributive,

    #[error("element {element} is not join-indecomposable")]
    NotJoinIndecomposable { element: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Which axiom of an orthogonal block structure failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObsViolation {
    /// A partition in the closure has parts of different sizes.
    NonUniform { element: Partition },
    /// Two partitions in the closure do not commute.
    NonCommuting { first: Partition, second: Partition },
}

impl std::fmt::Display for ObsViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObsViolation::NonUniform { element } => {
                write!(f, "partition {element} is not uniform")
            }
            ObsViolation::NonCommuting { first, second } => {
                write!(f, "partitions {first} and {second} do not commute")
            }
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
