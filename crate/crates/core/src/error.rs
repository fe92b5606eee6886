use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a graph needs at least one vertex")]
    EmptyGraph,
    #[error("graphs with {0} vertices are not supported (max {max})", max = crate::pauli::MAX_QUBITS)]
    TooManyVertices(usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({i}, {j}) has an endpoint outside 1..={n}")]
    VertexOutOfRange { i: usize, j: usize, n: usize },
    #[error("graph is disconnected")]
    Disconnected,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("site {0} carries both X and Z")]
    YFactor(usize),
    #[error("invalid sequence entry {value} at site {site}")]
    BadSequenceEntry { site: usize, value: i64 },
    #[error("product leaves the X/Z framework: Y at sites {0:?}")]
    YCollision(Vec<usize>),
    #[error("cannot parse Pauli word {0:?}")]
    BadPauliWord(String),

    #[error("{n} qubits exceeds the dense limit of {limit}")]
    DenseLimit { n: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("angle {0} outside [0, pi/2]")]
    AngleOutOfRange(f64),
    #[error("classical enumeration over {n} parties exceeds the limit of {limit}; sample strategies instead")]
    EnumerationLimit { n: usize, limit: usize },

    #[error("no pairable pair of stabilizers")]
    NoPairablePair,
    #[error("invalid configuration: {}", join(.0))]
    InvalidConfig(Vec<Violation>),
    #[error("stabilizer index {0} is out of range")]
    BadIndex(usize),
    #[error("expected stabilizer rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("expression does not self-test its graph state (rank {rank} of {n})")]
    NotSelfTesting { rank: usize, n: usize },
    #[error("expression has {found} parties, graph has {expected}")]
    PartyMismatch { expected: usize, found: usize },
    #[error("term {term} is not a stabilizer of the given graph state")]
    NotAStabilizer { term: usize },
    #[error("no slope in [0, {max_s}] makes the fidelity bound saturate")]
    BoundNotFound { max_s: f64 },
    #[error("slope must be positive, got {0}")]
    NonPositiveSlope(f64),
    #[error("{0}")]
    InvalidArgument(String),

    #[error("unknown graph descriptor {0:?}")]
    UnknownGraph(String),
    #[error("unknown catalogue entry {0:?}")]
    UnknownCatalogue(String),
    #[error("parse error: {0}")]
    Parse(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A single broken requirement found by
/// [`validate_config`](crate::inequality::validate_config).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Index in a pair or the remainder does not refer into the stabilizer list.
    UnknownStabilizer { index: usize },
    /// A pair has no anticommuting position inside the rotated set.
    NoAnticommutingPosition { pair: (usize, usize) },
    /// A pair anticommutes at more than one rotated position.
    MultipleAnticommutingPositions { pair: (usize, usize), positions: Vec<usize> },
    /// A paired stabilizer is not the identity at a rotated position other than its pivot.
    PairNotIdentity { pair: (usize, usize), index: usize, position: usize },
    /// A remainder stabilizer acts non-trivially on a rotated position.
    RemainderNotIdentity { index: usize, position: usize },
    /// A rotated position lies outside 1..=n.
    PositionOutOfRange { position: usize },
    /// Weight is negative or not finite.
    BadWeight { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownStabilizer { index } => write!(f, "stabilizer S{index} does not exist"),
            Violation::NoAnticommutingPosition { pair: (l, k) } => {
                write!(f, "pair ({l},{k}) has no anticommuting position in AC")
            }
            Violation::MultipleAnticommutingPositions { pair: (l, k), positions } => {
                write!(f, "pair ({l},{k}) anticommutes at several AC positions {positions:?}")
            }
            Violation::PairNotIdentity { pair: (l, k), index, position } => {
                write!(f, "S{index} of pair ({l},{k}) is not the identity at AC position {position}")
            }
            Violation::RemainderNotIdentity { index, position } => {
                write!(f, "remainder S{index} is not the identity at AC position {position}")
            }
            Violation::PositionOutOfRange { position } => write!(f, "AC position {position} is out of range"),
            Violation::BadWeight { index } => write!(f, "weight of S{index} is negative or not finite"),
        }
    }
}
