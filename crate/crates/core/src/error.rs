use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Parent array or level-size list does not describe a single rooted tree
    /// in breadth-first order.
    #[error("malformed tree: {0}")]
    MalformedTree(String),

    /// A level index beyond the truncation depth.
    #[error("level {level} out of range (depth {depth})")]
    LevelOutOfRange { level: usize, depth: usize },

    /// No vertex in the truncation satisfies the witness threshold.
    #[error("no witness vertex at this depth: {0}")]
    NoWitness(String),

    /// The instance's exponent pair does not match the requested result.
    #[error("wrong exponents: {0}")]
    WrongExponents(String),

    /// Tail criterion name not recognized.
    #[error("unknown tail criterion: {0}")]
    UnknownCriterion(String),

    /// Every level of the truncation has a single vertex.
    #[error("no level with at least two vertices")]
    NoSuitableLevel,

    /// Example id outside 1..=6.
    #[error("unknown example id: {0}")]
    UnknownExample(u32),

    /// The instance does not have the shape the operation requires
    /// (e.g. a multiplication-operator result on a non-identity self map).
    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),

    /// Component values fail validation (nonpositive weight, target out of
    /// range, length mismatch, bad exponent, ...).
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
