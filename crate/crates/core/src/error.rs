use num_bigint::BigInt;
use thiserror::Error;

use crate::circle::CircleError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error("membership of character {0} undecidable at the precision cap")]
    UndecidableMembership(i64),
    #[error("no separating set within budget {budget}{}", stage.map(|s| format!(" at stage {s}")).unwrap_or_default())]
    BudgetExceeded { budget: u64, stage: Option<usize> },
    #[error("points {0} and {1} cannot be separated at the precision cap")]
    DegenerateSpacing(String, String),
    #[error("{0} lies in the subgroup")]
    NotInComplement(String),
    #[error("no solution up to {bound}")]
    NotFound { bound: u64 },
    #[error("relation {h:?} maps to a non-integer")]
    RelationViolation { h: Vec<BigInt> },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("source sequence exhausted at output index {0}")]
    ExhaustedSource(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
