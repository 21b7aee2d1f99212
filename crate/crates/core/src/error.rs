use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime >= 3")]
    NotPrime(i64),

    #[error("block length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid slope {slope} for p = {p}")]
    InvalidSlope { slope: i32, p: u32 },

    #[error("invalid parity group index {index} for p = {p}")]
    InvalidGroupIndex { index: u32, p: u32 },

    #[error("parity groups of equal slope {0} have no unique crossing")]
    EqualSlopes(i32),

    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("{erased} erasures exceed the redundancy of {redundancy}")]
    TooManyErasures { erased: usize, redundancy: usize },

    #[error("column {0} does not exist")]
    NoSuchColumn(u32),

    #[error("column {0} is not a systematic column")]
    NotSystematic(u32),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("surviving columns are inconsistent with the code (corruption detected)")]
    Corrupt,

    #[error("linear system is rank deficient: {0}")]
    RankDeficient(String),

    #[error("plan transmits from erased or dead node {0}")]
    ErasedSource(u32),

    #[error("not enough live nodes: {alive} alive, {needed} needed")]
    InsufficientSurvivors { alive: usize, needed: usize },

    #[error("node {0} is not failed")]
    NodeAlive(u32),

    #[error("container: {0}")]
    Container(String),
}
