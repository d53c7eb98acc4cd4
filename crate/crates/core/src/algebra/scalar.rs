//! Scalar abstraction for the term engine and series code: the coefficient
//! ring is pluggable (exact rationals, rational functions, or the quadratic
//! extension), with concrete type aliases at the crate root.

use super::quadext::QuadExt;
use super::ratfunc::RatFunc;
use crate::Rational;
use num_traits::{One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Neg, Sub};

/// Coefficient ring of the term engine. All operations are exact.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
{
    fn from_rational(q: &Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        self.clone() * Self::from_rational(q)
    }

    fn ref_add(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn ref_sub(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }

    fn ref_mul(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn ref_neg(&self) -> Self {
        -self.clone()
    }
}

/// Scalars admitting exact division, used by the elimination solver.
pub trait FieldScalar: Scalar {
    /// `None` when the element is zero (or not invertible).
    fn inverse(&self) -> Option<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        Some(self.ref_mul(&other.inverse()?))
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn ref_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ref_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn ref_mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl FieldScalar for Rational {
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(<Rational as One>::one() / self)
        }
    }
}

impl Scalar for RatFunc {
    fn from_rational(q: &Rational) -> Self {
        RatFunc::constant(q.clone())
    }
    fn mul_rational(&self, q: &Rational) -> Self {
        RatFunc::mul_rational(self, q)
    }
    fn ref_add(&self, other: &Self) -> Self {
        RatFunc::add(self, other)
    }
    fn ref_sub(&self, other: &Self) -> Self {
        RatFunc::sub(self, other)
    }
    fn ref_mul(&self, other: &Self) -> Self {
        RatFunc::mul(self, other)
    }
    fn ref_neg(&self) -> Self {
        RatFunc::neg(self)
    }
}

impl FieldScalar for RatFunc {
    fn inverse(&self) -> Option<Self> {
        RatFunc::inverse(self).ok()
    }
}

impl Scalar for QuadExt {
    fn from_rational(q: &Rational) -> Self {
        QuadExt::from_ratfunc(RatFunc::constant(q.clone()))
    }
    fn mul_rational(&self, q: &Rational) -> Self {
        QuadExt::mul_rational(self, q)
    }
    fn ref_add(&self, other: &Self) -> Self {
        self.try_add(other)
            .expect("quadratic extensions must share their relation")
    }
    fn ref_mul(&self, other: &Self) -> Self {
        self.try_mul(other)
            .expect("quadratic extensions must share their relation")
    }
    fn ref_neg(&self) -> Self {
        QuadExt::neg(self)
    }
}

impl FieldScalar for QuadExt {
    fn inverse(&self) -> Option<Self> {
        QuadExt::inverse(self).ok()
    }
}
