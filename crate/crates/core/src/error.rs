//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by presentation, spectrum, rank-space and oracle computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A presentation has more generators than bitsets can index.
    #[error("presentation has {count} generators; at most {max} are supported")]
    TooManyGenerators { count: usize, max: usize },

    /// Prime enumeration refused because the generator cap is exceeded.
    #[error("generator cap exceeded: {count} generators, cap {cap} (raise it with --cap)")]
    CapExceeded { count: usize, cap: usize },

    /// Structurally invalid input (bad indices, duplicate names, malformed tables).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Input lies outside the class an operation supports.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A base map of a tensor product sends a base generator to a non-unit.
    #[error("base map image is not a unit: {0}")]
    NotUnit(String),

    /// Some point of minimal rank could not be certified or refuted.
    #[error("rank space undecidable; uncertified points: {points:?}")]
    Undecidable { points: Vec<String> },

    /// A comultiplication does not descend to the rank space.
    #[error("law does not descend at pair ({left}, {right}): {reason}")]
    LawDoesNotDescend {
        left: String,
        right: String,
        reason: String,
    },

    /// Two rank points share a vanishing pattern.
    #[error("duplicate rank-point pattern {0}")]
    DuplicatePattern(String),

    /// Expression or family text failed to parse.
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A semiring point is missing a value for an auxiliary generator.
    #[error("missing value for auxiliary generator {0}")]
    MissingAux(String),

    /// Evaluation in a semiring or field failed.
    #[error("evaluation failed: {0}")]
    Eval(String),

    /// Unknown catalog model selector.
    #[error("unknown model: {0}")]
    UnknownModel(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
