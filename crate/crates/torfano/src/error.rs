use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("duplicate variety `{0}`")]
    DuplicateVariety(String),
    #[error("unknown variety `{0}`")]
    UnknownVariety(String),
    #[error("ray index {index} out of range 1..={rays}")]
    RayOutOfRange { index: usize, rays: usize },
    #[error("relation system has rank {found}, expected {expected}")]
    RelationRank { found: usize, expected: usize },
    #[error("no unimodular choice of free rays")]
    NoUnimodularElimination,
    #[error("ray {0} solves to a zero or imprimitive vector")]
    ImprimitiveRay(usize),
    #[error("fan is not smooth and complete: {0}")]
    InvalidFan(String),
    #[error("basis has length {found}, expected {expected}")]
    BasisLength { found: usize, expected: usize },
    #[error("basis is not unimodular (gram determinant {0})")]
    NotUnimodular(i128),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("singular matrix")]
    Singular,
    #[error("integer overflow in {0}")]
    Overflow(String),
    #[error("invalid case configuration for {id}: {msg}")]
    Config { id: String, msg: String },
    #[error("empty search box")]
    EmptyBox,
    #[error("family {case}: {msg}")]
    Family { case: String, msg: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
