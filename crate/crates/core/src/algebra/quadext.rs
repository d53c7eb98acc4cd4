//! Quadratic ring extension `K[a3] / (a3^2 - rho)` over the rational-function
//! field `K`. The radical is never evaluated: `a3` stays formal and its square
//! is rewritten to `rho` on every multiplication.

use super::ratfunc::RatFunc;
use super::{AlgebraError, Result};
use crate::Rational;
use std::fmt;
use std::sync::Arc;

/// An element `base + rad * a3` with the relation `a3^2 = rho`.
///
/// Elements with `rad = 0` may carry no relation (`rho = None`); they are
/// compatible with any extension.
#[derive(Clone)]
pub struct QuadExt {
    base: RatFunc,
    rad: RatFunc,
    rho: Option<Arc<RatFunc>>,
}

impl QuadExt {
    pub fn from_ratfunc(base: RatFunc) -> QuadExt {
        QuadExt {
            base,
            rad: RatFunc::zero(),
            rho: None,
        }
    }

    pub fn zero() -> QuadExt {
        QuadExt::from_ratfunc(RatFunc::zero())
    }

    pub fn one() -> QuadExt {
        QuadExt::from_ratfunc(RatFunc::one())
    }

    /// The formal radical `a3` with `a3^2 = rho`.
    pub fn radical(rho: RatFunc) -> QuadExt {
        QuadExt {
            base: RatFunc::zero(),
            rad: RatFunc::one(),
            rho: Some(Arc::new(rho)),
        }
    }

    pub fn new(base: RatFunc, rad: RatFunc, rho: RatFunc) -> QuadExt {
        let rho = if rad.is_zero() {
            None
        } else {
            Some(Arc::new(rho))
        };
        QuadExt { base, rad, rho }
    }

    pub fn base(&self) -> &RatFunc {
        &self.base
    }

    pub fn rad(&self) -> &RatFunc {
        &self.rad
    }

    pub fn rho(&self) -> Option<&RatFunc> {
        self.rho.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.rad.is_zero()
    }

    pub fn is_pure(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn as_ratfunc(&self) -> Option<&RatFunc> {
        if self.rad.is_zero() {
            Some(&self.base)
        } else {
            None
        }
    }

    fn unify_rho(&self, other: &QuadExt) -> Result<Option<Arc<RatFunc>>> {
        match (&self.rho, &other.rho) {
            (None, None) => Ok(None),
            (Some(r), None) => Ok(Some(r.clone())),
            (None, Some(r)) => Ok(Some(r.clone())),
            (Some(a), Some(b)) => {
                if a.as_ref() == b.as_ref() {
                    Ok(Some(a.clone()))
                } else {
                    Err(AlgebraError::IncompatibleExtension(
                        a.to_string(),
                        b.to_string(),
                    ))
                }
            }
        }
    }

    fn with_rho(mut self, rho: Option<Arc<RatFunc>>) -> QuadExt {
        self.rho = if self.rad.is_zero() { None } else { rho };
        self
    }

    pub fn try_add(&self, other: &QuadExt) -> Result<QuadExt> {
        let rho = self.unify_rho(other)?;
        Ok(QuadExt {
            base: self.base.add(&other.base),
            rad: self.rad.add(&other.rad),
            rho: None,
        }
        .with_rho(rho))
    }

    pub fn try_sub(&self, other: &QuadExt) -> Result<QuadExt> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> QuadExt {
        QuadExt {
            base: self.base.neg(),
            rad: self.rad.neg(),
            rho: self.rho.clone(),
        }
    }

    /// Conjugate `base - rad * a3`.
    pub fn conj(&self) -> QuadExt {
        QuadExt {
            base: self.base.clone(),
            rad: self.rad.neg(),
            rho: self.rho.clone(),
        }
    }

    /// Multiplication with the rewrite `a3^2 -> rho`; no power of `a3` above
    /// one survives.
    pub fn try_mul(&self, other: &QuadExt) -> Result<QuadExt> {
        let rho = self.unify_rho(other)?;
        let cross = self.rad.mul(&other.rad);
        let base = if cross.is_zero() {
            self.base.mul(&other.base)
        } else {
            let r = rho
                .as_deref()
                .expect("nonzero radical parts carry a relation");
            self.base.mul(&other.base).add(&cross.mul(r))
        };
        let rad = self.base.mul(&other.rad).add(&self.rad.mul(&other.base));
        Ok(QuadExt { base, rad, rho: None }.with_rho(rho))
    }

    pub fn mul_rational(&self, c: &Rational) -> QuadExt {
        QuadExt {
            base: self.base.mul_rational(c),
            rad: self.rad.mul_rational(c),
            rho: self.rho.clone(),
        }
        .with_rho(self.rho.clone())
    }

    /// Field norm `base^2 - rad^2 * rho`.
    pub fn norm(&self) -> RatFunc {
        match &self.rho {
            None => self.base.mul(&self.base),
            Some(r) => self
                .base
                .mul(&self.base)
                .sub(&self.rad.mul(&self.rad).mul(r)),
        }
    }

    pub fn inverse(&self) -> Result<QuadExt> {
        let n = self.norm();
        if n.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let ninv = n.inverse()?;
        Ok(QuadExt {
            base: self.base.mul(&ninv),
            rad: self.rad.neg().mul(&ninv),
            rho: self.rho.clone(),
        }
        .with_rho(self.rho.clone()))
    }

    pub fn try_div(&self, other: &QuadExt) -> Result<QuadExt> {
        self.try_mul(&other.inverse()?)
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        if self.base != other.base || self.rad != other.rad {
            return false;
        }
        // Relations must agree whenever both radical parts are nonzero.
        if self.rad.is_zero() {
            true
        } else {
            match (&self.rho, &other.rho) {
                (Some(a), Some(b)) => a.as_ref() == b.as_ref(),
                _ => true,
            }
        }
    }
}

impl Eq for QuadExt {}

impl std::ops::Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: QuadExt) -> QuadExt {
        self.try_add(&rhs)
            .expect("quadratic extensions must share their relation")
    }
}

impl std::ops::Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: QuadExt) -> QuadExt {
        self.try_sub(&rhs)
            .expect("quadratic extensions must share their relation")
    }
}

impl std::ops::Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: QuadExt) -> QuadExt {
        self.try_mul(&rhs)
            .expect("quadratic extensions must share their relation")
    }
}

impl std::ops::Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::neg(&self)
    }
}

impl num_traits::Zero for QuadExt {
    fn zero() -> Self {
        QuadExt::zero()
    }
    fn is_zero(&self) -> bool {
        QuadExt::is_zero(self)
    }
}

impl num_traits::One for QuadExt {
    fn one() -> Self {
        QuadExt::one()
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rad.is_zero() {
            return write!(f, "{}", self.base);
        }
        if self.base.is_zero() {
            write!(f, "({}) * a3", self.rad)
        } else {
            write!(f, "({}) + ({}) * a3", self.base, self.rad)
        }
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratfunc::parse_ratfunc;

    #[test]
    fn radical_squares_to_rho() {
        let rho = parse_ratfunc("psi - 2").unwrap();
        let a3 = QuadExt::radical(rho.clone());
        let sq = a3.try_mul(&a3).unwrap();
        assert_eq!(sq, QuadExt::from_ratfunc(rho));
    }

    #[test]
    fn identity_multiplication() {
        let rho = parse_ratfunc("psi").unwrap();
        let a3 = QuadExt::radical(rho);
        let one = QuadExt::one();
        assert_eq!(one.try_mul(&a3).unwrap(), a3);
    }

    #[test]
    fn mismatched_relations_error() {
        let a = QuadExt::radical(parse_ratfunc("psi").unwrap());
        let b = QuadExt::radical(parse_ratfunc("psi - 1").unwrap());
        assert!(matches!(
            a.try_mul(&b),
            Err(AlgebraError::IncompatibleExtension(_, _))
        ));
    }

    #[test]
    fn inverse_is_exact() {
        let rho = parse_ratfunc("psi + 5").unwrap();
        let x = QuadExt::new(
            parse_ratfunc("psi").unwrap(),
            parse_ratfunc("1/(psi-1)").unwrap(),
            rho,
        );
        let inv = x.inverse().unwrap();
        assert_eq!(x.try_mul(&inv).unwrap(), QuadExt::one());
    }
}
