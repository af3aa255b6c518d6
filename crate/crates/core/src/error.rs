use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid octal digit '{digit}' in generator \"{generator}\"")]
    InvalidOctal { generator: String, digit: char },

    #[error("empty generator string")]
    EmptyGenerator,

    #[error("generator {generator} needs {bits} bits but the register holds only {width}")]
    GeneratorTooWide {
        generator: String,
        bits: u32,
        width: u32,
    },

    #[error("expected {expected} generators, got {got}")]
    GeneratorCount { expected: usize, got: usize },

    #[error("invalid encoder configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported bits per symbol h={0} (expected 1 or 2)")]
    UnsupportedModulation(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("frame length {frame_len} is not a multiple of the block count {blocks}")]
    BlocksDoNotDivide { frame_len: usize, blocks: usize },

    #[error("invalid block assignment: {0}")]
    InvalidAssignment(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not non-negative definite (principal minor sum of order {order} is {value})")]
    NotPositiveSemidefinite { order: usize, value: i128 },

    #[error("identical codewords: pairwise diversity is zero")]
    ZeroDiversity,

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("code is catastrophic")]
    Catastrophic,

    #[error("term budget exceeded at node {node}: {terms} terms > cap {cap} (delta_h={delta_h:?}, delta_p={delta_p:?})")]
    TermBudget {
        node: String,
        terms: usize,
        cap: usize,
        delta_h: Option<u32>,
        delta_p: Option<f64>,
    },

    #[error("weight overflow in exact arithmetic")]
    WeightOverflow,

    #[error("search space of 2^{log2_size} candidates exceeds the guard of 2^{guard}")]
    SearchSpaceTooLarge { log2_size: u32, guard: u32 },

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
