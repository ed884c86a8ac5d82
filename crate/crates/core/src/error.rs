use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("scalar domain mismatch: expected {expected}, found {found}")]
    Domain { expected: String, found: String },
    #[error("constant term is not invertible")]
    NotInvertible,
    #[error("matrix is singular")]
    Singular,
    #[error("variable {0} is a Novikov variable and cannot be differentiated")]
    NovikovDerivative(usize),
    #[error("variable index {index} out of range for {count} variables")]
    VariableOutOfRange { index: usize, count: usize },
    #[error("truncation too small: need t_order >= {needed}, have {have}")]
    TruncationTooSmall { needed: usize, have: usize },
    #[error("pole at q = 0")]
    PoleAtZero,
    #[error("division by the zero polynomial")]
    ZeroDenominator,
    #[error("length mismatch: expected {expected}, found {found}")]
    Length { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("sampler constraint system infeasible at t-degree {order}")]
    Infeasible { order: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
