use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("residue size q must be at least 2, got {q}")]
    ResidueSizeTooSmall { q: u32 },

    #[error("{context} requires a prime residue size, got q = {q}")]
    PrimeRequired { q: u32, context: &'static str },

    #[error("digit {digit} out of range for base {q}")]
    DigitOutOfRange { digit: u32, q: u32 },

    #[error("digit ordering must be a permutation of 0..q")]
    InvalidDigitOrdering,

    #[error("the two points coincide, no smallest disc separates them")]
    IdenticalPoints,

    #[error("exponent t must be positive, got {t}")]
    NonPositiveExponent { t: f64 },

    #[error("level {got} too small, need at least {required}")]
    LevelTooSmall { required: usize, got: usize },

    #[error("center has {center_depth} digits, not representable at level {level}")]
    CenterTooDeep { center_depth: usize, level: usize },

    #[error("point set must be nonempty")]
    EmptyPointSet,

    #[error("grid depth {depth} too small for {pairs} perturbation pairs, need depth >= {required}")]
    GridDepthTooSmall {
        pairs: usize,
        depth: usize,
        required: usize,
    },

    #[error("operands belong to different ring specifications")]
    SpecMismatch,

    #[error("cutoff level {cutoff} exceeds table level {level}")]
    CutoffTooDeep { cutoff: usize, level: usize },

    #[error("cannot combine an empty list of functions")]
    EmptyCombination,

    #[error("expected {expected} table values, got {got}")]
    TableSizeMismatch { expected: usize, got: usize },

    #[error("a level-{level} table over q = {q} does not fit in memory")]
    TableTooLarge { q: u32, level: usize },

    #[error("parse error: {0}")]
    Parse(String),
}
