//! Exact arithmetic foundation: multivariate polynomials, reduced rational
//! functions, a quadratic ring extension and small polynomial-system solving.

pub mod poly;
pub mod quadext;
pub mod ratfunc;
pub mod resultant;
pub mod scalar;
pub mod solve;

use thiserror::Error;

/// Errors raised by the exact-algebra layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraError {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("incompatible quadratic extensions: {0} vs {1}")]
    IncompatibleExtension(String, String),
    #[error("system is inconsistent: residual equation {0} = 0 has no solution")]
    Inconsistent(String),
    #[error("system is underdetermined; free unknowns: {0:?}")]
    Underdetermined(Vec<String>),
    #[error("cannot solve: {0}")]
    NotSolvable(String),
    #[error("a second radical relation is not supported (existing a3^2 = {0})")]
    SecondRadical(String),
    #[error("evaluation is undefined: {0}")]
    BadEvaluation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
