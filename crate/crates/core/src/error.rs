//! Error type shared across the crate.

use thiserror::Error;

/// Which alphabet a symbol was checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Consumption,
    Request,
}

impl std::fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymbolKind::Consumption => write!(f, "consumption"),
            SymbolKind::Request => write!(f, "request"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("alpha must be at least 1: an alpha = 0 channel carries no information")]
    DegenerateAlpha,

    #[error("gamma ({gamma}) must be at least alpha ({alpha}) so peak demand is satisfiable")]
    GammaBelowAlpha { gamma: u32, alpha: u32 },

    #[error("initial battery level {s0} outside [0, {beta}]")]
    InitialLevelOutOfRange { s0: u32, beta: u32 },

    #[error("battery level {level} outside [0, {beta}]")]
    LevelOutOfRange { level: i64, beta: u32 },

    #[error("{kind} symbol {value} outside [0, {max}]")]
    SymbolOutOfRange {
        kind: SymbolKind,
        value: u32,
        max: u32,
    },

    #[error("sequence must have at least one symbol")]
    EmptySequence,

    #[error("length mismatch: consumption has {x_len} symbols, request has {y_len}")]
    LengthMismatch { x_len: usize, y_len: usize },

    #[error("enumerating {candidates} candidate request sequences exceeds the cap of {cap}")]
    EnumerationCapExceeded { candidates: u128, cap: u64 },

    #[error("distribution support exceeds the cap of {cap} sequences")]
    SupportCapExceeded { cap: u64 },

    #[error("block length must be at least 1")]
    ZeroBlockLength,

    #[error(
        "block length {l} exceeds the maximum feasible block length \
         floor((beta+1)/alpha) = {max_l}"
    )]
    BlockLengthInfeasible { l: usize, max_l: usize },

    #[error("sequence length {n} is not a multiple of the block length {l}")]
    NotBlockAligned { n: usize, l: usize },

    #[error("trapdoor mapping requires alpha = gamma = 1, got alpha = {alpha}, gamma = {gamma}")]
    UnsupportedTrapdoorConfig { alpha: u32, gamma: u32 },

    #[error("probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },

    #[error("mean {mu} outside [0, {alpha}]")]
    MeanOutOfRange { mu: f64, alpha: u32 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("policy has no entry for consumption sequence {0:?}")]
    PolicyUndefined(Vec<u32>),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("brute-force search over {combinations} candidate policies exceeds the guard of {cap}")]
    SearchGuardExceeded { combinations: u128, cap: u64 },

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
