//! Generator registries and partial OPE tables.
//!
//! A table maps `(a, b, pole index n)` to a field expression; pairs may also
//! be declared regular (vanishing singular part) or carry declared-unknown
//! tail atoms. Pole indices follow the n-th product convention: the pole
//! `(z-w)^{-n-1}` corresponds to index `n`.

use super::expr::{Atom, FieldExpr};
use super::word::NOWord;
use super::{VResult, VoaError};
use crate::algebra::scalar::Scalar;
use crate::{ratio, Rational};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn xor(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self, other: Parity) -> Rational {
        if self == Parity::Odd && other == Parity::Odd {
            crate::rat(-1)
        } else {
            crate::rat(1)
        }
    }
}

/// Conformal weight of the shape `base + hcoef * h`, where `h` is a formal
/// half-integer slot used when the extension-field weight stays symbolic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Weight {
    pub base: Rational,
    pub hcoef: Rational,
}

impl Weight {
    pub fn rational(q: Rational) -> Weight {
        Weight {
            base: q,
            hcoef: Rational::zero(),
        }
    }

    pub fn int(n: i64) -> Weight {
        Weight::rational(crate::rat(n))
    }

    pub fn half(n: i64) -> Weight {
        Weight::rational(ratio(n, 2))
    }

    /// The formal symbolic weight `h`.
    pub fn formal() -> Weight {
        Weight {
            base: Rational::zero(),
            hcoef: crate::rat(1),
        }
    }

    pub fn zero() -> Weight {
        Weight::rational(Rational::zero())
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight {
            base: &self.base + &other.base,
            hcoef: &self.hcoef + &other.hcoef,
        }
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight {
            base: &self.base - &other.base,
            hcoef: &self.hcoef - &other.hcoef,
        }
    }

    pub fn add_int(&self, n: i64) -> Weight {
        Weight {
            base: &self.base + crate::rat(n),
            hcoef: self.hcoef.clone(),
        }
    }

    pub fn is_concrete(&self) -> bool {
        self.hcoef.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_concrete() {
            Some(&self.base)
        } else {
            None
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hcoef.is_zero() {
            write!(f, "{}", self.base)
        } else if self.base.is_zero() {
            write!(f, "{}h", self.hcoef)
        } else {
            write!(f, "{}+{}h", self.base, self.hcoef)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GenId(pub u16);

#[derive(Clone, Debug)]
pub struct GeneratorInfo {
    pub name: String,
    pub weight: Weight,
    pub parity: Parity,
    pub torus: Vec<i64>,
    pub is_virasoro: bool,
    pub is_primary: bool,
}

/// Generator registry; the registration order fixes the PBW order.
#[derive(Clone, Debug, Default)]
pub struct VoaAlgebra {
    gens: Vec<GeneratorInfo>,
    by_name: HashMap<String, GenId>,
    torus_dim: usize,
}

impl VoaAlgebra {
    pub fn new(torus_dim: usize) -> VoaAlgebra {
        VoaAlgebra {
            gens: Vec::new(),
            by_name: HashMap::new(),
            torus_dim,
        }
    }

    pub fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    pub fn add(&mut self, info: GeneratorInfo) -> GenId {
        assert_eq!(info.torus.len(), self.torus_dim, "torus weight length");
        assert!(
            !self.by_name.contains_key(&info.name),
            "duplicate generator {}",
            info.name
        );
        let id = GenId(self.gens.len() as u16);
        self.by_name.insert(info.name.clone(), id);
        self.gens.push(info);
        id
    }

    pub fn add_simple(&mut self, name: &str, weight: Weight, parity: Parity) -> GenId {
        let torus = vec![0; self.torus_dim];
        self.add(GeneratorInfo {
            name: name.to_string(),
            weight,
            parity,
            torus,
            is_virasoro: false,
            is_primary: false,
        })
    }

    pub fn info(&self, id: GenId) -> &GeneratorInfo {
        &self.gens[id.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> VResult<GenId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| VoaError::UnknownGenerator(name.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        (0..self.gens.len() as u16).map(GenId)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.gens[id.0 as usize].name
    }
}

#[derive(Clone, Debug, Default)]
pub struct PairEntry<S: Scalar> {
    /// `a_(n) b = 0` for `n >= max_pole`.
    pub max_pole: i64,
    pub entries: BTreeMap<i64, FieldExpr<S>>,
    /// Declared-unknown tails: opaque atoms at specific pole indices.
    pub unknown: BTreeMap<i64, Atom>,
}

/// A partial OPE table, frozen after construction.
#[derive(Clone)]
pub struct OpeTable<S: Scalar> {
    algebra: Arc<VoaAlgebra>,
    pairs: HashMap<(GenId, GenId), PairEntry<S>>,
}

impl<S: Scalar> OpeTable<S> {
    pub fn new(algebra: Arc<VoaAlgebra>) -> OpeTable<S> {
        OpeTable {
            algebra,
            pairs: HashMap::new(),
        }
    }

    pub fn algebra(&self) -> &Arc<VoaAlgebra> {
        &self.algebra
    }

    /// Declare `a(z) b(w)` regular (all singular products vanish).
    pub fn declare_regular(&mut self, a: GenId, b: GenId) {
        self.pairs.entry((a, b)).or_insert_with(|| PairEntry {
            max_pole: 0,
            entries: BTreeMap::new(),
            unknown: BTreeMap::new(),
        });
    }

    /// Declare both orders regular.
    pub fn declare_regular_sym(&mut self, a: GenId, b: GenId) {
        self.declare_regular(a, b);
        if a != b {
            self.declare_regular(b, a);
        }
    }

    pub fn set_entry(&mut self, a: GenId, b: GenId, pole: i64, value: FieldExpr<S>) {
        let e = self.pairs.entry((a, b)).or_default();
        e.max_pole = e.max_pole.max(pole + 1);
        if !value.is_zero() {
            e.entries.insert(pole, value);
        } else {
            e.entries.entry(pole).or_insert_with(FieldExpr::zero);
        }
    }

    pub fn set_unknown(&mut self, a: GenId, b: GenId, pole: i64, atom: Atom) {
        let e = self.pairs.entry((a, b)).or_default();
        e.max_pole = e.max_pole.max(pole + 1);
        e.unknown.insert(pole, atom);
    }

    /// Raise the declared maximal pole bound without adding entries.
    pub fn set_max_pole(&mut self, a: GenId, b: GenId, max_pole: i64) {
        let e = self.pairs.entry((a, b)).or_default();
        e.max_pole = e.max_pole.max(max_pole);
    }

    pub fn pair(&self, a: GenId, b: GenId) -> Option<&PairEntry<S>> {
        self.pairs.get(&(a, b))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(GenId, GenId), &PairEntry<S>)> {
        self.pairs.iter()
    }

    /// Maximal pole bound for an ordered generator pair, using the stored
    /// order or its opposite.
    pub fn max_pole(&self, a: GenId, b: GenId) -> VResult<i64> {
        if let Some(e) = self.pairs.get(&(a, b)) {
            return Ok(e.max_pole);
        }
        if let Some(e) = self.pairs.get(&(b, a)) {
            return Ok(e.max_pole);
        }
        Err(VoaError::IncompleteTable {
            a: self.algebra.name(a).to_string(),
            b: self.algebra.name(b).to_string(),
            pole: -1,
        })
    }

    /// Direct lookup of `a_(n) b` for plain generators, without skew
    /// symmetry. `Ok(None)` means the pair is stored only in the other order.
    pub fn lookup_direct(&self, a: GenId, b: GenId, n: i64) -> VResult<Option<FieldExpr<S>>> {
        let entry = match self.pairs.get(&(a, b)) {
            Some(e) => e,
            None => {
                return if self.pairs.contains_key(&(b, a)) {
                    Ok(None)
                } else {
                    Err(VoaError::IncompleteTable {
                        a: self.algebra.name(a).to_string(),
                        b: self.algebra.name(b).to_string(),
                        pole: n,
                    })
                }
            }
        };
        if n >= entry.max_pole {
            return Ok(Some(FieldExpr::zero()));
        }
        let mut out = entry
            .entries
            .get(&n)
            .cloned()
            .unwrap_or_else(FieldExpr::zero);
        if let Some(atom) = entry.unknown.get(&n) {
            out.add_atom(atom.clone(), S::one());
        }
        Ok(Some(out))
    }
}

/// Convenience: a single-generator word.
pub fn gen_word(id: GenId) -> NOWord {
    NOWord::single(id, 0)
}
