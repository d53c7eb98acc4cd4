//! Multivariate polynomials over arbitrary-precision rationals.
//!
//! Monomials are ordered by graded lexicographic order with the fixed global
//! variable order `psi < c < lambda < (everything else by name)`. Canonical
//! forms are exact records, so two polynomials are equal iff their term maps
//! are identical.

use crate::{Integer, Rational};
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use smallvec::SmallVec;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Mutex;

static INTERNER: Lazy<Mutex<HashSet<&'static str>>> = Lazy::new(|| Mutex::new(HashSet::new()));

fn intern(name: &str) -> &'static str {
    let mut set = INTERNER.lock().unwrap();
    if let Some(s) = set.get(name) {
        return s;
    }
    let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
    set.insert(leaked);
    leaked
}

/// A polynomial variable. Ordered by `(class, name)` where the class pins
/// `psi < c < lambda` ahead of all other symbols.
#[derive(Clone, Copy, Eq)]
pub struct Var {
    class: u8,
    name: &'static str,
}

impl Var {
    pub fn new(name: &str) -> Var {
        let class = match name {
            "psi" => 0,
            "c" => 1,
            "lambda" => 2,
            _ => 3,
        };
        Var {
            class,
            name: intern(name),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.class == other.class
            && (std::ptr::eq(self.name, other.name) || self.name == other.name)
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.class, self.name).cmp(&(other.class, other.name))
    }
}

impl std::hash::Hash for Var {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.class.hash(state);
        self.name.hash(state);
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// A monomial: sorted list of `(variable, exponent)` pairs, exponents > 0.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Monomial(SmallVec::from_slice(&[(v, 1)]))
    }

    pub fn var_pow(v: Var, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(SmallVec::from_slice(&[(v, e)]))
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Monomial {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::new();
        for (v, e) in pairs {
            if let Some(last) = out.last_mut() {
                if last.0 == v {
                    last.1 += e;
                    continue;
                }
            }
            out.push((v, e));
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j >= other.0.len() || (i < self.0.len() && self.0[i].0 < other.0[j].0) {
                out.push(self.0[i]);
                i += 1;
            } else if i >= self.0.len() || other.0[j].0 < self.0[i].0 {
                out.push(other.0[j]);
                j += 1;
            } else {
                out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                i += 1;
                j += 1;
            }
        }
        Monomial(out)
    }

    /// Divides, returning `None` when not divisible.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::new();
        let mut i = 0;
        for &(v, e) in &other.0 {
            loop {
                if i >= self.0.len() {
                    return None;
                }
                let (w, f) = self.0[i];
                if w < v {
                    out.push((w, f));
                    i += 1;
                } else if w == v {
                    if f < e {
                        return None;
                    }
                    if f > e {
                        out.push((w, f - e));
                    }
                    i += 1;
                    break;
                } else {
                    return None;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        Some(Monomial(out))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: higher total degree first, ties broken by the
    /// exponent of the earliest variable in the global order.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va < vb {
                        // self has the earlier variable with positive exponent
                        return Ordering::Greater;
                    } else if vb < va {
                        return Ordering::Less;
                    } else {
                        match ea.cmp(&eb) {
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            ord => return ord,
                        }
                    }
                }
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(v, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// A multivariate polynomial with rational coefficients; no zero terms stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> MultiPoly {
        MultiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> MultiPoly {
        MultiPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> MultiPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MultiPoly { terms }
    }

    pub fn from_i64(n: i64) -> MultiPoly {
        MultiPoly::constant(Rational::from_integer(Integer::from(n)))
    }

    pub fn var(v: Var) -> MultiPoly {
        MultiPoly::from_term(Monomial::var(v), Rational::one())
    }

    pub fn var_named(name: &str) -> MultiPoly {
        MultiPoly::var(Var::new(name))
    }

    pub fn from_term(m: Monomial, c: Rational) -> MultiPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (Monomial, Rational)>) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (m, c) in pairs {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut set = BTreeSet::new();
        for m in self.terms.keys() {
            set.extend(m.vars());
        }
        set
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Leading term under the graded lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_rational(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(mm, k)| (mm.mul(m), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut out = MultiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn try_divide(&self, other: &MultiPoly) -> Option<MultiPoly> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MultiPoly::zero());
        }
        if let Some(c) = other.as_constant() {
            return Some(self.mul_rational(&(Rational::one() / c)));
        }
        let (lm, lc) = other.leading().unwrap();
        let mut rem = self.clone();
        let mut quo = MultiPoly::zero();
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().unwrap();
            let qm = rm.try_div(lm)?;
            let qc = rc / lc;
            quo.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&other.mul_term(&qm, &qc));
        }
        Some(quo)
    }

    /// Coefficients with respect to `v`: index `i` holds the coefficient of
    /// `v^i` (a polynomial in the remaining variables).
    pub fn coeffs_in(&self, v: Var) -> Vec<MultiPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            let rest = Monomial::from_pairs(
                m.pairs()
                    .iter()
                    .filter(|&&(w, _)| w != v)
                    .cloned()
                    .collect(),
            );
            out[e].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs(v: Var, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (i, p) in coeffs.iter().enumerate() {
            let vm = Monomial::var_pow(v, i as u32);
            for (m, c) in &p.terms {
                out.add_term(m.mul(&vm), c.clone());
            }
        }
        out
    }

    /// Rational content: the positive rational `q` such that `self / q` has
    /// coprime integer coefficients; carries the sign of the leading
    /// coefficient.
    pub fn rational_content(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        let mut num_gcd = Integer::zero();
        let mut den_lcm = Integer::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = Rational::new(num_gcd, den_lcm);
        if self.leading().unwrap().1.is_negative() {
            content = -content;
        }
        content
    }

    /// Integer-primitive form with positive leading coefficient.
    pub fn normalized_primitive(&self) -> MultiPoly {
        if self.is_zero() {
            return MultiPoly::zero();
        }
        let c = self.rational_content();
        self.mul_rational(&(Rational::one() / c))
    }

    /// Substitute rational values for every variable.
    pub fn eval_rational(&self, values: &BTreeMap<Var, Rational>) -> super::Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let val = values.get(&v).ok_or_else(|| {
                    super::AlgebraError::BadEvaluation(format!("no value for {}", v))
                })?;
                for _ in 0..e {
                    t *= val;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Greatest common divisor; integer-primitive with positive leading
    /// coefficient, so the result is canonical.
    pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        if a.is_zero() {
            return b.normalized_primitive();
        }
        if b.is_zero() {
            return a.normalized_primitive();
        }
        if a.is_constant() || b.is_constant() {
            return MultiPoly::one();
        }
        // Main variable: the largest variable appearing in either operand.
        let va = a.vars();
        let vb = b.vars();
        let x = *va.union(&vb).max().unwrap();
        let a_has = va.contains(&x);
        let b_has = vb.contains(&x);
        if a_has && !b_has {
            let (ca, _) = a.content_primitive(x);
            return MultiPoly::gcd(&ca, b);
        }
        if b_has && !a_has {
            let (cb, _) = b.content_primitive(x);
            return MultiPoly::gcd(a, &cb);
        }
        let (ca, pa) = a.content_primitive(x);
        let (cb, pb) = b.content_primitive(x);
        let cont = MultiPoly::gcd(&ca, &cb);
        let (mut f, mut g) = if pa.degree_in(x) >= pb.degree_in(x) {
            (pa, pb)
        } else {
            (pb, pa)
        };
        loop {
            let r = MultiPoly::prem(&f, &g, x);
            if r.is_zero() {
                let (_, pg) = g.content_primitive(x);
                return cont.mul(&pg).normalized_primitive();
            }
            if r.degree_in(x) == 0 {
                return cont;
            }
            f = g;
            let (_, pr) = r.content_primitive(x);
            g = pr;
        }
    }

    /// Content (gcd of `v`-coefficients) and primitive part with respect to `v`.
    pub fn content_primitive(&self, v: Var) -> (MultiPoly, MultiPoly) {
        let coeffs = self.coeffs_in(v);
        let mut cont = MultiPoly::zero();
        for c in &coeffs {
            if !c.is_zero() {
                cont = MultiPoly::gcd(&cont, c);
                if cont.is_one() {
                    break;
                }
            }
        }
        if cont.is_zero() {
            return (MultiPoly::zero(), MultiPoly::zero());
        }
        let prim = self
            .try_divide(&cont)
            .expect("content must divide the polynomial");
        (cont, prim)
    }

    /// Pseudo-remainder of `f` by `g` with respect to `v`.
    pub fn prem(f: &MultiPoly, g: &MultiPoly, v: Var) -> MultiPoly {
        let dg = g.degree_in(v);
        let g_coeffs = g.coeffs_in(v);
        let lg = &g_coeffs[dg as usize];
        let mut r = f.clone();
        while !r.is_zero() {
            let dr = r.degree_in(v);
            if dr < dg {
                break;
            }
            let lr = r.coeffs_in(v)[dr as usize].clone();
            // r <- lg*r - lr*v^(dr-dg)*g
            let shift = Monomial::var_pow(v, dr - dg);
            r = r.mul(lg).sub(&g.mul(&lr).mul_term(&shift, &Rational::one()));
        }
        r
    }
}

impl fmt::Display for MultiPoly {
    /// Canonical text form: terms in descending monomial order with explicit
    /// signs and exponents.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", abs, m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn v(name: &str) -> MultiPoly {
        MultiPoly::var_named(name)
    }

    #[test]
    fn variable_order_is_psi_c_lambda_then_names() {
        let psi = Var::new("psi");
        let c = Var::new("c");
        let lam = Var::new("lambda");
        let a0 = Var::new("a0");
        let zz = Var::new("zz");
        assert!(psi < c && c < lam && lam < a0 && a0 < zz);
    }

    #[test]
    fn grlex_orders_by_degree_then_early_variable() {
        let psi = Var::new("psi");
        let c = Var::new("c");
        let p2 = Monomial::var_pow(psi, 2);
        let pc = Monomial::from_pairs(vec![(psi, 1), (c, 1)]);
        let c2 = Monomial::var_pow(c, 2);
        let p1 = Monomial::var(psi);
        assert!(p2 > pc && pc > c2);
        assert!(c2 > p1);
    }

    #[test]
    fn exact_division_and_gcd_cancel_common_factor() {
        let psi = v("psi");
        let f = psi.mul(&psi).sub(&MultiPoly::one()); // psi^2-1
        let g = psi.sub(&MultiPoly::one()); // psi-1
        let q = f.try_divide(&g).unwrap();
        assert_eq!(q, psi.add(&MultiPoly::one()));
        assert_eq!(MultiPoly::gcd(&f, &g), g);
    }

    #[test]
    fn gcd_multivariate() {
        let psi = v("psi");
        let n = v("n");
        // (psi+n)^2*(psi-1) and (psi+n)*(psi+2)
        let a = psi.add(&n).pow(2).mul(&psi.sub(&MultiPoly::one()));
        let b = psi.add(&n).mul(&psi.add(&MultiPoly::from_i64(2)));
        assert_eq!(MultiPoly::gcd(&a, &b), psi.add(&n));
    }

    #[test]
    fn display_is_canonical() {
        let psi = v("psi");
        let p = psi
            .pow(2)
            .mul_rational(&rat(2))
            .sub(&psi.mul_rational(&rat(3)))
            .add(&MultiPoly::constant(crate::ratio(1, 2)));
        assert_eq!(p.to_string(), "2*psi^2 - 3*psi + 1/2");
    }
}
