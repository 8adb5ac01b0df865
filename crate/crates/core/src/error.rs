use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample multiset is empty")]
    EmptySample,
    #[error("vertex {0} appears in more than one move")]
    DuplicateMover(usize),
    #[error("move of vertex {0} is not a member of the move set")]
    MoveNotInSet(usize),
    #[error("recursion trace does not tile the vertex set: {0}")]
    TraceMismatch(String),
    #[error("invalid parameter: {0}")]
    BadParam(String),
    #[error("{what} supports at most {cap} vertices, got {got}")]
    TooLarge { what: &'static str, cap: usize, got: usize },
    #[error("consumer `{0}` retained data without declaring its word count")]
    ConsumerRetentionUndeclared(String),
    #[error("sample ensemble {cursor} requested but only {supply} were drawn")]
    EnsembleExhausted { cursor: usize, supply: usize },
    #[error("node of size {size} does not fit level {level} band [{lo:.2}, {hi:.2}]")]
    LevelOverflow { size: usize, level: usize, lo: f64, hi: f64 },
    #[error("cut decomposition failed after {0} attempts")]
    DecompositionFailure(usize),
    #[error("not a Hamiltonian path: {0}")]
    InvalidPath(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("binary format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
