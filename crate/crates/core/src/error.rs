use std::fmt;

use thiserror::Error;

/// A positioned syntax error produced by the formula or base parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    /// Byte offset into the input.
    pub pos: usize,
    /// 1-based line and column of `pos`.
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: unexpected {}, expected one of: {}",
            self.line,
            self.column,
            self.found,
            self.expected.join(", ")
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),

    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),

    #[error("base is outside the basis: {0}")]
    BaseOutsideBasis(String),

    #[error("augmented base is outside the basis: {0}")]
    AugmentedBaseOutsideBasis(String),

    #[error("formula is not clausal: `{0}`")]
    FormulaNotClausal(String),

    #[error("the empty base has no formula image")]
    EmptyBase,

    #[error("atom `{0}` is not in the context vocabulary")]
    AtomOutsideVocabulary(String),

    #[error("vocabulary of {atoms} atoms gives {contexts} contexts, over the cap of {cap}")]
    VocabularyTooLarge { atoms: usize, contexts: u128, cap: u128 },

    #[error("enumeration of {requested} bases exceeds the cap of {cap}")]
    EnumerationCapExceeded { requested: u128, cap: u128 },

    #[error("connective `{0}` has no counterpart in the standard language")]
    UnmappableConnective(&'static str),

    #[error("{atoms} atoms exceeds the truth-table limit of {limit}")]
    TooManyAtoms { atoms: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
