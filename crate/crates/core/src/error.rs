//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("structure constants are not associative at basis triple ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),

    #[error("unit vector does not act as a two-sided identity on basis element {0}")]
    BadUnit(usize),

    #[error("multiplication is not graded at basis pair ({0}, {1})")]
    NotGraded(usize, usize),

    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),

    #[error("field lacks the required roots of unity: {0}")]
    FieldLacksRoots(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Frobenius form is degenerate")]
    DegenerateForm,

    #[error("element is not a unit")]
    NotAUnit,

    #[error("condition (F) violated: {0}")]
    ConditionFViolation(String),

    #[error("arrow `{0}` references an undeclared vertex")]
    DanglingArrow(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },

    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),

    #[error("bimodule actions do not match: {0}")]
    ActionMismatch(String),

    #[error("leading term of the matrix series is singular")]
    SingularLeadingTerm,

    #[error("algebra is not finite dimensional within the cutoff")]
    NotFiniteDimensional,

    #[error("word degree exceeds the bound {0}")]
    DegreeBoundExceeded(usize),

    #[error("completion did not terminate within the bound; {pending} ambiguities pending")]
    NonTerminatingWithinBound { pending: usize },

    #[error("value at vertex {0} is not linear over the vertex algebra")]
    NotALinearResult(usize),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("no Frobenius form vanishing on the unit exists")]
    NoSuchForm,

    #[error("unit search exhausted without finding a unit in the kernel")]
    SearchExhausted,

    #[error("form does not vanish on the unit")]
    FormNonVanishingOnUnit,

    #[error("filtration is not multiplicative at layer pair ({0}, {1})")]
    NotMultiplicative(usize, usize),

    #[error("decorations are not comparable: {0}")]
    NotComparable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
