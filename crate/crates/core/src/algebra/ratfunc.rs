//! Reduced rational functions: `num/den` with `gcd(num, den) = 1` and the
//! denominator monic under the global monomial order. Equality is record
//! identity.

use super::poly::{Monomial, MultiPoly, Var};
use super::{AlgebraError, Result};
use crate::Rational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn one() -> RatFunc {
        RatFunc {
            num: MultiPoly::one(),
            den: MultiPoly::one(),
        }
    }

    pub fn constant(c: Rational) -> RatFunc {
        RatFunc {
            num: MultiPoly::constant(c),
            den: MultiPoly::one(),
        }
    }

    pub fn from_i64(n: i64) -> RatFunc {
        RatFunc::constant(Rational::from_integer(n.into()))
    }

    pub fn var(v: Var) -> RatFunc {
        RatFunc {
            num: MultiPoly::var(v),
            den: MultiPoly::one(),
        }
    }

    pub fn var_named(name: &str) -> RatFunc {
        RatFunc::var(Var::new(name))
    }

    pub fn from_poly(p: MultiPoly) -> RatFunc {
        RatFunc {
            num: p,
            den: MultiPoly::one(),
        }
    }

    /// Canonical reduced form of `num/den`.
    pub fn reduced(num: MultiPoly, den: MultiPoly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = MultiPoly::gcd(&num, &den);
        let mut num = num.try_divide(&g).expect("gcd divides numerator");
        let mut den = den.try_divide(&g).expect("gcd divides denominator");
        // Make the denominator monic.
        let lead = den.leading().unwrap().1.clone();
        if !lead.is_one() {
            let inv = Rational::one() / lead;
            num = num.mul_rational(&inv);
            den = den.mul_rational(&inv);
        }
        Ok(RatFunc { num, den })
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::reduced(num, den).expect("nonzero denominators")
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::reduced(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    pub fn mul_rational(&self, c: &Rational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.mul_rational(c),
            den: self.den.clone(),
        }
    }

    pub fn inverse(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        RatFunc::reduced(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut out = RatFunc::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(out)
    }

    /// Substitute rational functions for some variables (others stay).
    pub fn subst(&self, map: &BTreeMap<Var, RatFunc>) -> Result<RatFunc> {
        let num = subst_poly(&self.num, map)?;
        let den = subst_poly(&self.den, map)?;
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        num.div(&den)
    }

    /// Substitute a single variable.
    pub fn subst_var(&self, v: Var, value: &RatFunc) -> Result<RatFunc> {
        let mut map = BTreeMap::new();
        map.insert(v, value.clone());
        self.subst(&map)
    }

    /// Evaluate at rational values for every variable.
    pub fn eval_rational(&self, values: &BTreeMap<Var, Rational>) -> Result<Rational> {
        let n = self.num.eval_rational(values)?;
        let d = self.den.eval_rational(values)?;
        if d.is_zero() {
            return Err(AlgebraError::BadEvaluation(
                "denominator vanishes at the given point".into(),
            ));
        }
        Ok(n / d)
    }
}

fn subst_poly(p: &MultiPoly, map: &BTreeMap<Var, RatFunc>) -> Result<RatFunc> {
    let mut acc = RatFunc::zero();
    for (m, c) in p.terms() {
        let mut t = RatFunc::constant(c.clone());
        for &(v, e) in m.pairs() {
            match map.get(&v) {
                Some(rf) => t = t.mul(&rf.pow(e as i64)?),
                None => {
                    t = t.mul(&RatFunc::from_poly(MultiPoly::from_term(
                        Monomial::var_pow(v, e),
                        Rational::one(),
                    )))
                }
            }
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

impl std::ops::Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        RatFunc::add(&self, &rhs)
    }
}

impl std::ops::Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        RatFunc::sub(&self, &rhs)
    }
}

impl std::ops::Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        RatFunc::mul(&self, &rhs)
    }
}

impl std::ops::Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc::neg(&self)
    }
}

impl num_traits::Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

impl num_traits::One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Recursive-descent parser for rational-function expressions.
///
/// Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/')
/// unary)*`, `unary := '-'? power`, `power := atom ('^' integer)?`,
/// `atom := integer | name | '(' expr ')'`. Names are interned as variables.
pub fn parse_ratfunc(src: &str) -> Result<RatFunc> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(AlgebraError::Parse(format!(
            "trailing input at token {:?}",
            p.tokens[p.pos]
        )));
    }
    Ok(e)
}

/// Parse an expression that must be a polynomial (denominator 1).
pub fn parse_poly(src: &str) -> Result<MultiPoly> {
    let rf = parse_ratfunc(src)?;
    if !rf.is_polynomial() {
        return Err(AlgebraError::Parse(format!(
            "expected polynomial, found denominator {}",
            rf.den()
        )));
    }
    Ok(rf.num().clone())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(Rational),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                out.push(Tok::Minus);
            }
            '*' => {
                chars.next();
                out.push(Tok::Star);
            }
            '/' => {
                chars.next();
                out.push(Tok::Slash);
            }
            '^' => {
                chars.next();
                out.push(Tok::Caret);
            }
            '(' => {
                chars.next();
                out.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                out.push(Tok::RParen);
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n: crate::Integer = s
                    .parse()
                    .map_err(|_| AlgebraError::Parse(format!("bad integer {}", s)))?;
                out.push(Tok::Int(Rational::from_integer(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Name(s));
            }
            other => {
                return Err(AlgebraError::Parse(format!("unexpected character {:?}", other)))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            let neg = if matches!(self.peek(), Some(Tok::Minus)) {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.next() {
                Some(Tok::Int(n)) => {
                    let mut e: i64 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| AlgebraError::Parse("exponent too large".into()))?;
                    if neg {
                        e = -e;
                    }
                    return base.pow(e);
                }
                other => {
                    return Err(AlgebraError::Parse(format!(
                        "expected integer exponent, found {:?}",
                        other
                    )))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(RatFunc::constant(n)),
            Some(Tok::Name(s)) => Ok(RatFunc::var_named(&s)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    other => Err(AlgebraError::Parse(format!(
                        "expected ')', found {:?}",
                        other
                    ))),
                }
            }
            other => Err(AlgebraError::Parse(format!(
                "unexpected token {:?}",
                other
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn reduce_cancels_factors() {
        // (psi^2 - 1) / (psi - 1) -> psi + 1
        let psi = MultiPoly::var_named("psi");
        let num = psi.mul(&psi).sub(&MultiPoly::one());
        let den = psi.sub(&MultiPoly::one());
        let r = RatFunc::reduced(num, den).unwrap();
        assert_eq!(r, RatFunc::from_poly(psi.add(&MultiPoly::one())));
    }

    #[test]
    fn reduce_zero_numerator() {
        let psi = MultiPoly::var_named("psi");
        let r = RatFunc::reduced(MultiPoly::zero(), psi.sub(&MultiPoly::one())).unwrap();
        assert!(r.is_zero());
        assert!(r.den().is_one());
    }

    #[test]
    fn zero_denominator_is_an_error() {
        let e = RatFunc::reduced(MultiPoly::one(), MultiPoly::zero());
        assert_eq!(e.unwrap_err(), AlgebraError::DivisionByZero);
    }

    #[test]
    fn reduce_is_idempotent() {
        let r = parse_ratfunc("(psi^2-1)*(psi+2) / ((psi-1)*(2*psi+4))").unwrap();
        let again = RatFunc::reduced(r.num().clone(), r.den().clone()).unwrap();
        assert_eq!(r, again);
        assert_eq!(r, parse_ratfunc("(psi+1)/2").unwrap());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let r = parse_ratfunc("-(psi-1)*psi/((2*psi-5)*(2*psi-2*psi-1+2)*(2*psi+2*psi-1-2))")
            .unwrap();
        let back = parse_ratfunc(&r.to_string()).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn evaluation_homomorphism() {
        let f = parse_ratfunc("(psi+1)/(psi-2)").unwrap();
        let g = parse_ratfunc("psi^2/(psi+3)").unwrap();
        let mut at = std::collections::BTreeMap::new();
        at.insert(Var::new("psi"), rat(5));
        let lhs = f.mul(&g).eval_rational(&at).unwrap();
        let rhs = f.eval_rational(&at).unwrap() * g.eval_rational(&at).unwrap();
        assert_eq!(lhs, rhs);
    }
}
