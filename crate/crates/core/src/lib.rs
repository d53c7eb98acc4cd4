//! Exact symbolic computation for vertex algebras.
//!
//! The crate is organized around an exact scalar tower
//! (`Rational` -> [`MultiPoly`] -> [`RatFunc`] -> [`QuadExt`]) and a term
//! engine for normally ordered products of vertex-algebra fields driven by a
//! partial OPE table. On top of those sit the curated algebra data
//! ([`data`]), the Jacobi-identity reconstruction solver ([`recon`]), the
//! truncation-curve algebra ([`curves`]) and a truncated exact q-series
//! engine ([`qseries`]).
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod algebra;
pub mod curves;
pub mod data;
pub mod qseries;
pub mod recon;
pub mod voa;

/// Arbitrary-precision rational scalar used throughout the crate.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;

pub use algebra::poly::{Monomial, MultiPoly, Var};
pub use algebra::quadext::QuadExt;
pub use algebra::ratfunc::RatFunc;
pub use algebra::scalar::{FieldScalar, Scalar};

/// Shorthand for a `Rational` from an `i64`.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(Integer::from(n))
}

/// Shorthand for a `Rational` fraction `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(Integer::from(n), Integer::from(d))
}
