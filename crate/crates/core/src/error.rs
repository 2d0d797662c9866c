use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("code {code} is not valid in space {space}")]
    InvalidCode { code: u64, space: String },
    #[error("requested {requested} points but space {space} has only {size}")]
    CountExceedsSpace {
        requested: u64,
        size: u64,
        space: String,
    },
    #[error("coding overflow in space {0}")]
    CodingOverflow(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("mazur index must be at least 1")]
    IndexZero,
    #[error("ground set has {size} points; the exhaustive family allows at most {limit}")]
    GroundTooLarge { size: usize, limit: usize },
    #[error("submeasure {0} has no reduced constraint family")]
    NoReducedFamily(String),
    #[error("submeasure is infinite on the ground set")]
    InfiniteBound,
    #[error("objective set is not contained in the ground set")]
    ObjectiveOutsideGround,
    #[error("arithmetic overflow in the simplex tableau")]
    LpOverflow,
    #[error("recursion depth exceeded")]
    RecursionDepthExceeded,
    #[error("empty sequence has no tail")]
    EmptySequence,
    #[error("no antichain element avoids all supplied points")]
    NoAvoidingElement,
    #[error("resolution {0} exceeds the supported maximum of 6")]
    ResolutionTooLarge(u32),
    #[error("universe of size {0} is exhausted")]
    UniverseExhausted(u64),
    #[error("node measure total {found} differs from the required {expected}")]
    MeasureMismatch { expected: String, found: String },
    #[error("the set M has measure zero")]
    ZeroMeasureM,
    #[error("level {level} out of range for depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("finiteness of a generator is not decidable: {0}")]
    UndecidableFiniteness(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
