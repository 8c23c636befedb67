use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("window is empty or does not contain the origin")]
    EmptyWindow,

    #[error("not differentiable: run starting at {start} has length {length}")]
    NotDifferentiable { start: i64, length: usize },

    #[error("the run containing the origin is not complete")]
    OriginRunIncomplete,

    #[error("the elementary block containing the origin is not complete")]
    OriginBlockIncomplete,

    #[error("window too small: {0}")]
    InsufficientWindow(String),

    #[error("insufficient depth: needed {needed} derivations, got {available}")]
    InsufficientDepth { needed: usize, available: usize },

    #[error("inconsistent position tag at level {level}")]
    InconsistentTags { level: usize },

    #[error("word is not alternating at index {index}")]
    NotAlternating { index: i64 },

    #[error("both type-0 and type-1 elementary blocks occur")]
    TypeConflict,

    #[error("type is indeterminate at derivation level {level}")]
    Indeterminate { level: usize },

    #[error("no shift reconstructs the window")]
    NoMatch,

    #[error("type sequence too short: need {needed} bits, have {available}")]
    SpecTooShort { needed: usize, available: usize },

    #[error("point ({a}, {b}) lies outside the homography domain")]
    DomainViolation { a: f64, b: f64 },

    #[error("fixed-point iteration did not converge (measured ratios {ratios:?})")]
    NonConvergence { ratios: Vec<f64> },

    #[error("undecidable for a type sequence with unknown tail")]
    Undecidable,

    #[error("enumeration of 2^{rank} cells exceeds budget {budget}")]
    BudgetExceeded { rank: u32, budget: u64 },

    #[error("invalid alphabet parameters: {0}")]
    InvalidParams(String),

    #[error("empty pattern")]
    EmptyPattern,
}

impl Error {
    /// Errors caused by malformed input rather than by the mathematics.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidParams(_))
    }
}
