//! Field expressions: finite linear combinations of normally ordered words
//! plus an unknown tail of opaque atoms, all with scalar coefficients.

use super::table::{Parity, VoaAlgebra, Weight};
use super::word::NOWord;
use crate::algebra::scalar::Scalar;
use crate::Rational;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// An opaque unknown field with declared weight, torus weights and parity.
/// Atoms participate linearly; products with known fields yield derived
/// atoms whose names record the operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub name: Arc<str>,
    pub weight: Weight,
    pub torus: Vec<i64>,
    pub parity: Parity,
}

impl Atom {
    pub fn new(name: &str, weight: Weight, torus: Vec<i64>, parity: Parity) -> Atom {
        Atom {
            name: Arc::from(name),
            weight,
            torus,
            parity,
        }
    }

    /// Atom obtained from `op` applied to this one, shifting the weight by
    /// `dw` (an integer amount `-n-1+wt(x)` resolved by the caller).
    pub fn derived(&self, op: &str, weight: Weight, torus: Vec<i64>, parity: Parity) -> Atom {
        Atom {
            name: Arc::from(format!("{}[{}]", op, self.name)),
            weight,
            torus,
            parity,
        }
    }
}

/// A linear combination of PBW words and unknown atoms.
#[derive(Clone, PartialEq, Debug)]
pub struct FieldExpr<S: Scalar> {
    pub terms: BTreeMap<NOWord, S>,
    pub atoms: BTreeMap<Atom, S>,
}

impl<S: Scalar> Default for FieldExpr<S> {
    fn default() -> Self {
        FieldExpr::zero()
    }
}

impl<S: Scalar> FieldExpr<S> {
    pub fn zero() -> FieldExpr<S> {
        FieldExpr {
            terms: BTreeMap::new(),
            atoms: BTreeMap::new(),
        }
    }

    /// The identity field `1`.
    pub fn one() -> FieldExpr<S> {
        FieldExpr::from_word(NOWord::one(), S::one())
    }

    pub fn from_word(w: NOWord, c: S) -> FieldExpr<S> {
        let mut e = FieldExpr::zero();
        e.add_word(w, c);
        e
    }

    pub fn from_atom(a: Atom, c: S) -> FieldExpr<S> {
        let mut e = FieldExpr::zero();
        e.add_atom(a, c);
        e
    }

    pub fn word(w: NOWord) -> FieldExpr<S> {
        FieldExpr::from_word(w, S::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.atoms.is_empty()
    }

    pub fn add_word(&mut self, w: NOWord, c: S) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().ref_add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_atom(&mut self, a: Atom, c: S) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.atoms.entry(a) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().ref_add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_expr(&mut self, other: &FieldExpr<S>) {
        for (w, c) in &other.terms {
            self.add_word(w.clone(), c.clone());
        }
        for (a, c) in &other.atoms {
            self.add_atom(a.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &FieldExpr<S>, k: &S) {
        if k.is_zero() {
            return;
        }
        for (w, c) in &other.terms {
            self.add_word(w.clone(), c.ref_mul(k));
        }
        for (a, c) in &other.atoms {
            self.add_atom(a.clone(), c.ref_mul(k));
        }
    }

    pub fn add_scaled_rational(&mut self, other: &FieldExpr<S>, k: &Rational) {
        for (w, c) in &other.terms {
            self.add_word(w.clone(), c.mul_rational(k));
        }
        for (a, c) in &other.atoms {
            self.add_atom(a.clone(), c.mul_rational(k));
        }
    }

    pub fn sub_expr(&mut self, other: &FieldExpr<S>) {
        for (w, c) in &other.terms {
            self.add_word(w.clone(), c.ref_neg());
        }
        for (a, c) in &other.atoms {
            self.add_atom(a.clone(), c.ref_neg());
        }
    }

    pub fn scaled(&self, k: &S) -> FieldExpr<S> {
        let mut out = FieldExpr::zero();
        out.add_scaled(self, k);
        out
    }

    pub fn scaled_rational(&self, k: &Rational) -> FieldExpr<S> {
        let mut out = FieldExpr::zero();
        out.add_scaled_rational(self, k);
        out
    }

    pub fn neg(&self) -> FieldExpr<S> {
        let mut out = FieldExpr::zero();
        out.sub_expr(self);
        out
    }

    pub fn coefficient(&self, w: &NOWord) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    /// Coefficient of the identity word (the "vacuum multiple").
    pub fn constant_part(&self) -> S {
        self.coefficient(&NOWord::one())
    }

    /// Homogeneous parity of the expression, if consistent.
    pub fn parity(&self, alg: &VoaAlgebra) -> Option<Parity> {
        let mut p: Option<Parity> = None;
        for w in self.terms.keys() {
            let wp = w.parity(alg);
            match p {
                None => p = Some(wp),
                Some(q) if q == wp => {}
                _ => return None,
            }
        }
        for a in self.atoms.keys() {
            match p {
                None => p = Some(a.parity),
                Some(q) if q == a.parity => {}
                _ => return None,
            }
        }
        p.or(Some(Parity::Even))
    }

    /// Homogeneous weight, if every term agrees. The identity word matches
    /// any weight only when it is the sole term.
    pub fn weight(&self, alg: &VoaAlgebra) -> Option<Weight> {
        let mut w: Option<Weight> = None;
        for word in self.terms.keys() {
            let ww = word.weight(alg);
            match &w {
                None => w = Some(ww),
                Some(prev) if *prev == ww => {}
                _ => return None,
            }
        }
        for a in self.atoms.keys() {
            match &w {
                None => w = Some(a.weight.clone()),
                Some(prev) if *prev == a.weight => {}
                _ => return None,
            }
        }
        w
    }

    pub fn map_scalars<T: Scalar>(&self, f: &impl Fn(&S) -> T) -> FieldExpr<T> {
        let mut out = FieldExpr::zero();
        for (w, c) in &self.terms {
            out.add_word(w.clone(), f(c));
        }
        for (a, c) in &self.atoms {
            out.add_atom(a.clone(), f(c));
        }
        out
    }

    pub fn display<'a>(&'a self, alg: &'a VoaAlgebra) -> ExprDisplay<'a, S> {
        ExprDisplay { expr: self, alg }
    }
}

pub struct ExprDisplay<'a, S: Scalar> {
    expr: &'a FieldExpr<S>,
    alg: &'a VoaAlgebra,
}

impl<S: Scalar> fmt::Display for ExprDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.expr.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}) {}", c, w.display(self.alg))?;
        }
        for (a, c) in &self.expr.atoms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}) {}", c, a.name)?;
        }
        Ok(())
    }
}
