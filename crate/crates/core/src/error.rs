use thiserror::Error;

use crate::cover::CoverSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: row has {found} columns, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("duplicate zero row on lines {first} and {second}")]
    DuplicateRow { first: usize, second: usize },

    #[error("clause {clause} expands past the cap of {cap} zeros")]
    ExpansionCap { clause: usize, cap: usize },

    #[error("infeasible: element {element} is covered by no set")]
    Infeasible { element: usize },

    #[error("{what} budget exceeded after {partial} items")]
    BudgetExceeded { what: &'static str, partial: u64 },

    /// The exact cover search ran out of budget; the best cover found so far
    /// and the proven lower bound are carried along.
    #[error("cover search budget exceeded (incumbent {}, bound {})", .0.objective, .0.lower_bound)]
    CoverBudget(Box<CoverSolution>),

    #[error("cube is not a prime implicant of the function")]
    NotPrime,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::CoverBudget(_))
    }
}
