//! Vertex-algebra term engine: normally ordered words, n-th products computed
//! from a partial OPE table, Jacobi-identity residuals with tracked unknowns,
//! and Shapovalov pairings.

pub mod engine;
pub mod expr;
pub mod parse;
pub mod shapovalov;
pub mod table;
pub mod word;

pub use engine::{Engine, EngineConfig};
pub use expr::{Atom, FieldExpr};
pub use table::{GenId, GeneratorInfo, OpeTable, Parity, VoaAlgebra, Weight};
pub use word::{Factor, NOWord};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VoaError {
    #[error("incomplete OPE table: pair ({a}, {b}) at pole index {pole}")]
    IncompleteTable { a: String, b: String, pole: i64 },
    #[error("coefficient extraction is not closed; contaminating unknowns: {0:?}")]
    Contaminated(Vec<String>),
    #[error("recursion depth exceeded (raise the weight cap only if the table is consistent)")]
    DepthExceeded,
    #[error("expression is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("weights must be concrete (no symbolic part) here: {0}")]
    SymbolicWeight(String),
    #[error("algebra error: {0}")]
    Algebra(#[from] crate::algebra::AlgebraError),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type VResult<T> = std::result::Result<T, VoaError>;
