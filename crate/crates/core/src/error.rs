use thiserror::Error;

use crate::background::ExprId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unbalanced parenthesis")]
    Unbalanced,
    #[error("operator without operand")]
    DanglingOperator,
    #[error("unexpected character {0:?}")]
    UnknownChar(char),
}

/// A syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// Every identifier is in use; the caller may collect garbage and retry.
    #[error("expression arena is full ({capacity} identifiers)")]
    ArenaFull { capacity: usize },

    #[error("identifier {0:?} does not denote a live expression")]
    StaleId(ExprId),

    #[error("equation right part has {got} cells, expected {expected}")]
    RowLength { got: usize, expected: usize },

    #[error("extended expressions cannot take part in equations")]
    ExtendedInEquation,

    #[error("constant term of an equation must be 0 or 1")]
    BadConstant,

    #[error("expression {0:?} has no equation")]
    NoEquation(ExprId),

    #[error("equation set is not complete: {0:?} has no equation in the set")]
    Incomplete(ExprId),

    #[error("Arden's rule needs a coefficient without the empty word")]
    NullableCoefficient,

    #[error("letter {0} is outside the alphabet")]
    UnknownLetter(u32),

    #[error("unknown algorithm letter {0:?}")]
    UnknownAlgorithm(char),

    #[error("algorithm letter 'a' (exhaustive regrouping) is not supported")]
    ReservedAlgorithm,
}

pub type Result<T> = std::result::Result<T, Error>;
