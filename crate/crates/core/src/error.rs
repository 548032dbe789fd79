use crate::exactnum::QField;
use thiserror::Error;

use crate::bounds::Condition;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid radicand {0}: must be a nonnegative squarefree integer")]
    InvalidRadicand(i64),

    #[error("radicand mismatch: sqrt({0}) and sqrt({1}) values cannot be combined")]
    RadicandMismatch(u64, u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("degree {0} exceeds the exact-mode cap of {1}")]
    DegreeTooLarge(usize, usize),

    #[error("regime mismatch: {regime} requires u0 = {expected}, found {found}")]
    RegimeMismatch { regime: String, expected: String, found: String },

    #[error("condition {condition} failed{}", witness_suffix(.witness))]
    ConditionFailed { condition: Condition, witness: Option<Box<QField>> },

    #[error("unusable polynomial: {0}")]
    Unusable(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("no certified polynomial after {0} refinement rounds")]
    NonConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}

fn witness_suffix(w: &Option<Box<QField>>) -> String {
    match w {
        Some(x) => format!(" (witness x = {})", x),
        None => String::new(),
    }
}
