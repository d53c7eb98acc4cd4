//! Normally ordered words: right-nested iterated Wick products of generator
//! derivatives, stored as ordered factor lists.

use super::table::{GenId, Parity, VoaAlgebra, Weight};
use smallvec::SmallVec;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Factor {
    pub gen: GenId,
    pub deriv: u32,
}

impl Factor {
    pub fn new(gen: GenId, deriv: u32) -> Factor {
        Factor { gen, deriv }
    }

    pub fn bump(self, by: u32) -> Factor {
        Factor {
            gen: self.gen,
            deriv: self.deriv + by,
        }
    }

    pub fn weight(&self, alg: &VoaAlgebra) -> Weight {
        alg.info(self.gen).weight.add_int(self.deriv as i64)
    }

    pub fn parity(&self, alg: &VoaAlgebra) -> Parity {
        alg.info(self.gen).parity
    }
}

/// The word `:∂^{d1}g1 (∂^{d2}g2 (... ∂^{dk}gk)...):`. The empty word is the
/// identity field.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct NOWord(pub SmallVec<[Factor; 4]>);

impl NOWord {
    pub fn one() -> NOWord {
        NOWord(SmallVec::new())
    }

    pub fn single(gen: GenId, deriv: u32) -> NOWord {
        NOWord(SmallVec::from_slice(&[Factor { gen, deriv }]))
    }

    pub fn from_factors(factors: &[Factor]) -> NOWord {
        NOWord(SmallVec::from_slice(factors))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn head(&self) -> Option<Factor> {
        self.0.first().copied()
    }

    /// The word with the head factor removed.
    pub fn tail(&self) -> NOWord {
        NOWord(SmallVec::from_slice(&self.0[1..]))
    }

    pub fn prepend(&self, x: Factor) -> NOWord {
        let mut v = SmallVec::with_capacity(self.0.len() + 1);
        v.push(x);
        v.extend_from_slice(&self.0);
        NOWord(v)
    }

    pub fn weight(&self, alg: &VoaAlgebra) -> Weight {
        let mut w = Weight::zero();
        for f in &self.0 {
            w = w.add(&f.weight(alg));
        }
        w
    }

    pub fn parity(&self, alg: &VoaAlgebra) -> Parity {
        let mut p = Parity::Even;
        for f in &self.0 {
            p = p.xor(f.parity(alg));
        }
        p
    }

    pub fn torus(&self, alg: &VoaAlgebra) -> Vec<i64> {
        let mut t = vec![0; alg.torus_dim()];
        for f in &self.0 {
            for (acc, w) in t.iter_mut().zip(alg.info(f.gen).torus.iter()) {
                *acc += w;
            }
        }
        t
    }

    /// PBW admissibility of adjacent factors: `x` may directly precede `y`.
    pub fn factor_precedes(alg: &VoaAlgebra, x: Factor, y: Factor) -> bool {
        if x.gen < y.gen {
            return true;
        }
        if x.gen > y.gen {
            return false;
        }
        match alg.info(x.gen).parity {
            Parity::Even => x.deriv >= y.deriv,
            Parity::Odd => x.deriv > y.deriv,
        }
    }

    pub fn is_canonical(&self, alg: &VoaAlgebra) -> bool {
        self.0
            .windows(2)
            .all(|w| NOWord::factor_precedes(alg, w[0], w[1]))
    }

    pub fn display<'a>(&'a self, alg: &'a VoaAlgebra) -> WordDisplay<'a> {
        WordDisplay { word: self, alg }
    }
}

pub struct WordDisplay<'a> {
    word: &'a NOWord,
    alg: &'a VoaAlgebra,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_one() {
            return write!(f, "1");
        }
        let wrap = self.word.len() > 1;
        if wrap {
            write!(f, ":")?;
        }
        let mut first = true;
        for fac in self.word.factors() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if fac.deriv == 1 {
                write!(f, "d ")?;
            } else if fac.deriv > 1 {
                write!(f, "d^{} ", fac.deriv)?;
            }
            write!(f, "{}", self.alg.name(fac.gen))?;
        }
        if wrap {
            write!(f, ":")?;
        }
        Ok(())
    }
}
