use thiserror::Error;

/// Errors raised by the library. Parse errors carry the offending line.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsrgError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid adjacency matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("generator has order {0}, which is not prime")]
    NotPrimeOrder(usize),

    #[error("permutation is not an automorphism of the graph")]
    NotAutomorphism,

    #[error("partition is not equitable: block ({row_orbit}, {col_orbit}) has non-constant {what}")]
    NotEquitable {
        row_orbit: usize,
        col_orbit: usize,
        what: &'static str,
    },

    #[error("orbit matrix shape error: {0}")]
    Shape(String),

    #[error("invalid orbit matrix: {0}")]
    InvalidOrbitMatrix(crate::orbit_matrix::Violation),

    #[error("orbit matrix entry ({i}, {j}) cannot be rescaled to an integer")]
    NonIntegralRescale { i: usize, j: usize },

    #[error("no block exists for bit ({source_orbit}, {target_orbit}): {reason}")]
    InconsistentBit {
        source_orbit: usize,
        target_orbit: usize,
        reason: String,
    },

    #[error("individual has no non-fixed bits to mutate")]
    NoFreeBits,

    #[error("cannot cross over {requested} genes out of {available}")]
    TooManyGenes { requested: usize, available: usize },

    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),

    #[error("brute-force enumeration refused: v = {v} exceeds cap {cap}")]
    EnumerationCap { v: usize, cap: usize },

    #[error("graph {index} does not satisfy the DSRG equations")]
    NotDsrg { index: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for DsrgError {
    fn from(e: std::io::Error) -> Self {
        DsrgError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DsrgError>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> DsrgError {
    DsrgError::Parse {
        line,
        msg: msg.into(),
    }
}
