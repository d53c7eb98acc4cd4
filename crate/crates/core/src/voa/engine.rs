//! The product engine: n-th products of normally ordered words computed from
//! a partial OPE table, reduced to PBW normal form.
//!
//! All computations reduce to the table lookups together with the standard
//! identities: the derivative shifts, the skew-symmetry formula, the
//! noncommutative Wick formula for positive products on words, the Borcherds
//! expansion for composite left operands, and the quasi-associativity
//! corrections when joining words under the normal order.

use super::expr::{Atom, FieldExpr};
use super::table::{GenId, OpeTable, Parity, VoaAlgebra, Weight};
use super::word::{Factor, NOWord};
use super::{VResult, VoaError};
use crate::algebra::scalar::Scalar;
use crate::{rat, Rational};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Hard recursion guard; generous for consistent tables.
    pub max_depth: usize,
    /// Cap on the total conformal weight of any single expression term
    /// (concrete part), mirroring the configured truncation limit.
    pub max_weight: i64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_depth: 512,
            max_weight: 12,
        }
    }
}

fn factorial(n: u32) -> Rational {
    let mut acc = crate::Integer::from(1);
    for k in 2..=n as u64 {
        acc *= crate::Integer::from(k);
    }
    Rational::from_integer(acc)
}

fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 || k > n {
        return Rational::from_integer(0.into());
    }
    let mut num = crate::Integer::from(1);
    let mut den = crate::Integer::from(1);
    for i in 0..k {
        num *= crate::Integer::from(n - i);
        den *= crate::Integer::from(i + 1);
    }
    Rational::new(num, den)
}

pub struct Engine<S: Scalar> {
    table: Arc<OpeTable<S>>,
    cache: Mutex<HashMap<(NOWord, NOWord, i64), FieldExpr<S>>>,
    config: EngineConfig,
}

impl<S: Scalar> Engine<S> {
    pub fn new(table: Arc<OpeTable<S>>) -> Engine<S> {
        Engine::with_config(table, EngineConfig::default())
    }

    pub fn with_config(table: Arc<OpeTable<S>>, config: EngineConfig) -> Engine<S> {
        Engine {
            table,
            cache: Mutex::new(HashMap::new()),
            config,
        }
    }

    pub fn table(&self) -> &Arc<OpeTable<S>> {
        &self.table
    }

    pub fn algebra(&self) -> &Arc<VoaAlgebra> {
        self.table.algebra()
    }

    fn alg(&self) -> &VoaAlgebra {
        self.table.algebra()
    }

    fn guard(&self, depth: usize) -> VResult<()> {
        if depth > self.config.max_depth {
            return Err(VoaError::DepthExceeded);
        }
        Ok(())
    }

    /// The n-th product `a_(n) b` in PBW normal form. For `n < 0` this is the
    /// normally ordered product with derivative prefactors,
    /// `(-n-1)! a_(n) b = :(d^(-n-1) a) b:`.
    pub fn nth_product(
        &self,
        a: &FieldExpr<S>,
        b: &FieldExpr<S>,
        n: i64,
    ) -> VResult<FieldExpr<S>> {
        let mut out = FieldExpr::zero();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                let p = self.word_product(wa, wb, n, 0)?;
                out.add_scaled(&p, &ca.ref_mul(cb));
            }
            for (ab, cb) in &b.atoms {
                let p = self.word_on_atom(wa, ab, n);
                out.add_scaled(&p, &ca.ref_mul(cb));
            }
        }
        for (aa, ca) in &a.atoms {
            for (wb, cb) in &b.terms {
                let p = self.atom_on_word(aa, wb, n);
                out.add_scaled(&p, &ca.ref_mul(cb));
            }
            if let Some((ab, _)) = b.atoms.iter().next() {
                return Err(VoaError::Contaminated(vec![
                    aa.name.to_string(),
                    ab.name.to_string(),
                ]));
            }
        }
        Ok(out)
    }

    /// Normally ordered product `:a b: = a_(-1) b`.
    pub fn wick(&self, a: &FieldExpr<S>, b: &FieldExpr<S>) -> VResult<FieldExpr<S>> {
        self.nth_product(a, b, -1)
    }

    pub fn derivative(&self, e: &FieldExpr<S>) -> VResult<FieldExpr<S>> {
        let mut out = FieldExpr::zero();
        for (w, c) in &e.terms {
            let d = self.derivative_word(w, 0)?;
            out.add_scaled(&d, c);
        }
        for (a, c) in &e.atoms {
            out.add_atom(self.derive_atom(a), c.clone());
        }
        Ok(out)
    }

    fn derive_atom(&self, a: &Atom) -> Atom {
        a.derived("d", a.weight.add_int(1), a.torus.clone(), a.parity)
    }

    fn derivative_word(&self, w: &NOWord, depth: usize) -> VResult<FieldExpr<S>> {
        self.guard(depth)?;
        if w.is_one() {
            return Ok(FieldExpr::zero());
        }
        let x = w.head().unwrap();
        let tail = w.tail();
        let mut out = self.insert_factor(x.bump(1), &tail, depth + 1)?;
        let dt = self.derivative_word(&tail, depth + 1)?;
        out.add_expr(&self.insert_into_expr(x, &dt, depth + 1)?);
        Ok(out)
    }

    /// `d^k w / 1` as an expression (no factorial normalization).
    fn iterated_derivative_word(&self, w: &NOWord, k: u32, depth: usize) -> VResult<FieldExpr<S>> {
        let mut e = FieldExpr::word(w.clone());
        for _ in 0..k {
            let mut next = FieldExpr::zero();
            for (word, c) in &e.terms {
                next.add_scaled(&self.derivative_word(word, depth)?, c);
            }
            for (a, c) in &e.atoms {
                next.add_atom(self.derive_atom(a), c.clone());
            }
            e = next;
        }
        Ok(e)
    }

    /// Pole bound for `x_(n) (word b)`: zero for all `n >=` the bound.
    fn mp_factor(&self, x: Factor, b: &NOWord) -> VResult<i64> {
        let mut total = x.deriv as i64;
        for y in b.factors() {
            total += self.table.max_pole(x.gen, y.gen)? + y.deriv as i64;
        }
        Ok(total)
    }

    fn mp_words(&self, a: &NOWord, b: &NOWord) -> VResult<i64> {
        let mut total = 0;
        for &x in a.factors() {
            total += self.mp_factor(x, b)?;
        }
        Ok(total)
    }

    /// `a_(n) b` for canonical words; memoized.
    fn word_product(&self, a: &NOWord, b: &NOWord, n: i64, depth: usize) -> VResult<FieldExpr<S>> {
        self.guard(depth)?;
        let key = (a.clone(), b.clone(), n);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let result = self.word_product_uncached(a, b, n, depth)?;
        self.cache.lock().unwrap().insert(key, result.clone());
        Ok(result)
    }

    fn word_product_uncached(
        &self,
        a: &NOWord,
        b: &NOWord,
        n: i64,
        depth: usize,
    ) -> VResult<FieldExpr<S>> {
        if a.is_one() {
            // 1_(n) b = delta_{n,-1} b
            return Ok(if n == -1 {
                FieldExpr::word(b.clone())
            } else {
                FieldExpr::zero()
            });
        }
        if a.len() == 1 {
            return self.factor_on_word(a.head().unwrap(), b, n, depth + 1);
        }
        if n < 0 {
            // a_(-k) b = :(d^(k-1) a) b: / (k-1)!
            let k = (-n) as u32;
            let da = self.iterated_derivative_word(a, k - 1, depth + 1)?;
            let mut out = FieldExpr::zero();
            for (w, c) in &da.terms {
                let j = self.wick_join(w, &FieldExpr::word(b.clone()), depth + 1)?;
                out.add_scaled(&j, c);
            }
            for (atom, c) in &da.atoms {
                let j = self.atom_join_word(atom, b);
                out.add_scaled(&j, c);
            }
            return Ok(out.scaled_rational(&(rat(1) / factorial(k - 1))));
        }
        // Borcherds expansion with a = :x a':
        let x = a.head().unwrap();
        let a1 = a.tail();
        let sign = Parity::sign(x.parity(self.alg()), a1.parity(self.alg()));
        let mut out = FieldExpr::zero();
        // sum_j x_(-1-j) ( a'_(n+j) b )
        let bound1 = self.mp_words(&a1, b)?;
        let mut j = 0i64;
        while n + j < bound1 {
            let inner = self.word_product(&a1, b, n + j, depth + 1)?;
            if !inner.is_zero() {
                let ins =
                    self.insert_into_expr(x.bump(j as u32), &inner, depth + 1)?;
                out.add_scaled_rational(&ins, &(rat(1) / factorial(j as u32)));
            }
            j += 1;
        }
        // sum_j (-1)^{|x||a'|} a'_(n-1-j) ( x_(j) b )
        let bound2 = self.mp_factor(x, b)?;
        for j in 0..bound2 {
            let inner = self.factor_on_word(x, b, j, depth + 1)?;
            if inner.is_zero() {
                continue;
            }
            let outer = self.word_on_expr(&a1, &inner, n - 1 - j, depth + 1)?;
            out.add_scaled_rational(&outer, &sign);
        }
        Ok(out)
    }

    fn word_on_expr(
        &self,
        a: &NOWord,
        e: &FieldExpr<S>,
        n: i64,
        depth: usize,
    ) -> VResult<FieldExpr<S>> {
        let mut out = FieldExpr::zero();
        for (w, c) in &e.terms {
            let p = self.word_product(a, w, n, depth)?;
            out.add_scaled(&p, c);
        }
        for (atom, c) in &e.atoms {
            let p = self.word_on_atom(a, atom, n);
            out.add_scaled(&p, c);
        }
        Ok(out)
    }

    fn expr_on_word(
        &self,
        e: &FieldExpr<S>,
        b: &NOWord,
        n: i64,
        depth: usize,
    ) -> VResult<FieldExpr<S>> {
        let mut out = FieldExpr::zero();
        for (w, c) in &e.terms {
            let p = self.word_product(w, b, n, depth)?;
            out.add_scaled(&p, c);
        }
        for (atom, c) in &e.atoms {
            let p = self.atom_on_word(atom, b, n);
            out.add_scaled(&p, c);
        }
        Ok(out)
    }

    /// `x_(n) b` for a single factor `x` and a word `b`; any `n`.
    fn factor_on_word(
        &self,
        x: Factor,
        b: &NOWord,
        n: i64,
        depth: usize,
    ) -> VResult<FieldExpr<S>> {
        self.guard(depth)?;
        if n < 0 {
            // (d^d g)_(-k) b = :(d^(d+k-1) g) b: / (k-1)!
            let k = (-n) as u32;
            let ins = self.insert_factor(x.bump(k - 1), b, depth + 1)?;
            return Ok(ins.scaled_rational(&(rat(1) / factorial(k - 1))));
        }
        if x.deriv > 0 {
            // (d a)_(n) = -n a_(n-1)
            let inner = self.factor_on_word(
                Factor::new(x.gen, x.deriv - 1),
                b,
                n - 1,
                depth + 1,
            )?;
            return Ok(inner.scaled_rational(&rat(-n)));
        }
        if b.is_one() {
            return Ok(FieldExpr::zero());
        }
        if b.len() == 1 {
            return self.factor_pair(x, b.head().unwrap(), n, depth + 1);
        }
        // Noncommutative Wick formula on b = :y b':
        let y = b.head().unwrap();
        let b1 = b.tail();
        let sign = Parity::sign(x.parity(self.alg()), y.parity(self.alg()));
        let mut out = FieldExpr::zero();
        // :(x_(n) y) b':
        let head = self.factor_pair(x, y, n, depth + 1)?;
        out.add_expr(&self.join_expr_word(&head, &b1, depth + 1)?);
        // (-1)^{|x||y|} :y (x_(n) b'):
        let inner = self.factor_on_word(x, &b1, n, depth + 1)?;
        let t2 = self.insert_into_expr(y, &inner, depth + 1)?;
        out.add_scaled_rational(&t2, &sign);
        // sum_{i=1..n} C(n,i) (x_(n-i) y)_(i-1) b'
        for i in 1..=n {
            let pair = self.factor_pair(x, y, n - i, depth + 1)?;
            if pair.is_zero() {
                continue;
            }
            let t = self.expr_on_word(&pair, &b1, i - 1, depth + 1)?;
            out.add_scaled_rational(&t, &binomial(n, i));
        }
        Ok(out)
    }

    /// `x_(n) y` for single factors, via the table plus derivative shifts and
    /// skew-symmetry.
    fn factor_pair(&self, x: Factor, y: Factor, n: i64, depth: usize) -> VResult<FieldExpr<S>> {
        self.guard(depth)?;
        if x.deriv > 0 {
            let inner =
                self.factor_pair(Factor::new(x.gen, x.deriv - 1), y, n - 1, depth + 1)?;
            return Ok(inner.scaled_rational(&rat(-n)));
        }
        if y.deriv > 0 {
            // a_(n) (d b) = d(a_(n) b) + n a_(n-1) b
            let prev = Factor::new(y.gen, y.deriv - 1);
            let e1 = self.factor_pair(x, prev, n, depth + 1)?;
            let mut out = self.derivative(&e1)?;
            if n != 0 {
                let e2 = self.factor_pair(x, prev, n - 1, depth + 1)?;
                out.add_scaled_rational(&e2, &rat(n));
            }
            return Ok(out);
        }
        if n < 0 {
            let k = (-n) as u32;
            let ins =
                self.insert_factor(Factor::new(x.gen, k - 1), &NOWord::single(y.gen, 0), depth + 1)?;
            return Ok(ins.scaled_rational(&(rat(1) / factorial(k - 1))));
        }
        match self.table.lookup_direct(x.gen, y.gen, n)? {
            Some(e) => Ok(e),
            None => {
                // Skew-symmetry from the stored opposite order:
                // a_(n) b = (-1)^{|a||b|} sum_j (-1)^{n+j+1} d^j (b_(n+j) a) / j!
                let sign = Parity::sign(x.parity(self.alg()), y.parity(self.alg()));
                let bound = self.table.max_pole(y.gen, x.gen)?;
                let mut out = FieldExpr::zero();
                let mut j: i64 = 0;
                while n + j < bound {
                    let inner = self
                        .table
                        .lookup_direct(y.gen, x.gen, n + j)?
                        .expect("pair stored in opposite order");
                    if !inner.is_zero() {
                        let mut d = inner;
                        for _ in 0..j {
                            d = self.derivative(&d)?;
                        }
                        let s = if (n + j + 1) % 2 == 0 { rat(1) } else { rat(-1) };
                        out.add_scaled_rational(&d, &(s / factorial(j as u32)));
                    }
                    j += 1;
                }
                Ok(out.scaled_rational(&sign))
            }
        }
    }

    /// Insert a factor under the normal order: `:x w:` in PBW form, using the
    /// quasi-commutativity corrections.
    fn insert_factor(&self, x: Factor, w: &NOWord, depth: usize) -> VResult<FieldExpr<S>> {
        self.guard(depth)?;
        if w.is_one() {
            return Ok(FieldExpr::word(NOWord::single(x.gen, x.deriv)));
        }
        let y = w.head().unwrap();
        if NOWord::factor_precedes(self.alg(), x, y) {
            return Ok(FieldExpr::word(w.prepend(x)));
        }
        let w1 = w.tail();
        let odd_square = x.gen == y.gen
            && x.deriv == y.deriv
            && self.alg().info(x.gen).parity == Parity::Odd;
        // Correction sum_i (-1)^i (x_(i) y)_(-2-i) w1
        let mut corr = FieldExpr::zero();
        let bound = self.table.max_pole(x.gen, y.gen)? + x.deriv as i64 + y.deriv as i64;
        for i in 0..bound {
            let pair = self.factor_pair(x, y, i, depth + 1)?;
            if pair.is_zero() {
                continue;
            }
            let t = self.expr_neg_on_word(&pair, 2 + i, &w1, depth + 1)?;
            let s = if i % 2 == 0 { rat(1) } else { rat(-1) };
            corr.add_scaled_rational(&t, &s);
        }
        if odd_square {
            // :x(xw'): = (1/2) * correction
            return Ok(corr.scaled_rational(&crate::ratio(1, 2)));
        }
        let sign = Parity::sign(x.parity(self.alg()), y.parity(self.alg()));
        let inner = self.insert_factor(x, &w1, depth + 1)?;
        let main = self.insert_into_expr(y, &inner, depth + 1)?;
        let mut out = main.scaled_rational(&sign);
        out.add_expr(&corr);
        Ok(out)
    }

    /// `(expr)_(-k) w` for `k >= 1`.
    fn expr_neg_on_word(
        &self,
        e: &FieldExpr<S>,
        k: i64,
        w: &NOWord,
        depth: usize,
    ) -> VResult<FieldExpr<S>> {
        let mut out = FieldExpr::zero();
        for (u, c) in &e.terms {
            let t = self.word_product(u, w, -k, depth)?;
            out.add_scaled(&t, c);
        }
        for (atom, c) in &e.atoms {
            let t = self.atom_on_word(atom, w, -k);
            out.add_scaled(&t, c);
        }
        Ok(out)
    }

    fn insert_into_expr(
        &self,
        x: Factor,
        e: &FieldExpr<S>,
        depth: usize,
    ) -> VResult<FieldExpr<S>> {
        let mut out = FieldExpr::zero();
        for (w, c) in &e.terms {
            let ins = self.insert_factor(x, w, depth)?;
            out.add_scaled(&ins, c);
        }
        for (atom, c) in &e.atoms {
            out.add_atom(self.wick_atom(x, atom), c.clone());
        }
        Ok(out)
    }

    /// Join a word onto an expression under the normal order, with the
    /// quasi-associativity corrections:
    /// `:(:a w':) B: = :a (:w' B:): + corrections`.
    fn wick_join(&self, w: &NOWord, b: &FieldExpr<S>, depth: usize) -> VResult<FieldExpr<S>> {
        self.guard(depth)?;
        if w.is_one() {
            return Ok(b.clone());
        }
        if w.len() == 1 {
            return self.insert_into_expr(w.head().unwrap(), b, depth + 1);
        }
        let a = w.head().unwrap();
        let w1 = w.tail();
        let sign = Parity::sign(a.parity(self.alg()), w1.parity(self.alg()));
        let base_inner = self.wick_join(&w1, b, depth + 1)?;
        let mut out = self.insert_into_expr(a, &base_inner, depth + 1)?;
        // corrections: sum_{n>=0} 1/(n+1)! [ :(d^{n+1}a)(w'_(n) B):
        //   + (-1)^{|a||w'|} :(d^{n+1}w')(a_(n) B): ]
        let mut bound1: i64 = 0;
        let mut bound2: i64 = 0;
        for (wb, _) in &b.terms {
            bound1 = bound1.max(self.mp_words(&w1, wb)?);
            bound2 = bound2.max(self.mp_factor(a, wb)?);
        }
        if !b.atoms.is_empty() {
            // Atoms have unknown pole structure against w; be conservative but
            // finite: contraction depth bounded by the engine weight cap.
            bound1 = bound1.max(self.config.max_weight);
            bound2 = bound2.max(self.config.max_weight);
        }
        for n in 0..bound1.max(bound2) {
            let inv = rat(1) / factorial(n as u32 + 1);
            if n < bound1 {
                let t1 = self.word_on_expr(&w1, b, n, depth + 1)?;
                if !t1.is_zero() {
                    let ins = self.insert_into_expr(a.bump(n as u32 + 1), &t1, depth + 1)?;
                    out.add_scaled_rational(&ins, &inv);
                }
            }
            if n < bound2 {
                let t2 = self.factor_on_expr(a, b, n, depth + 1)?;
                if !t2.is_zero() {
                    let dw = self.iterated_derivative_word(&w1, n as u32 + 1, depth + 1)?;
                    let mut joined = FieldExpr::zero();
                    for (u, c) in &dw.terms {
                        let j = self.wick_join(u, &t2, depth + 1)?;
                        joined.add_scaled(&j, c);
                    }
                    for (atom, c) in &dw.atoms {
                        let j = self.atom_join_expr(atom, &t2);
                        joined.add_scaled(&j, c);
                    }
                    out.add_scaled_rational(&joined, &(inv * &sign));
                }
            }
        }
        Ok(out)
    }

    fn join_expr_word(
        &self,
        e: &FieldExpr<S>,
        w: &NOWord,
        depth: usize,
    ) -> VResult<FieldExpr<S>> {
        let mut out = FieldExpr::zero();
        let rhs = FieldExpr::word(w.clone());
        for (u, c) in &e.terms {
            let j = self.wick_join(u, &rhs, depth)?;
            out.add_scaled(&j, c);
        }
        for (atom, c) in &e.atoms {
            let j = self.atom_join_word(atom, w);
            out.add_scaled(&j, c);
        }
        Ok(out)
    }

    fn factor_on_expr(
        &self,
        x: Factor,
        e: &FieldExpr<S>,
        n: i64,
        depth: usize,
    ) -> VResult<FieldExpr<S>> {
        let mut out = FieldExpr::zero();
        for (w, c) in &e.terms {
            let t = self.factor_on_word(x, w, n, depth)?;
            out.add_scaled(&t, c);
        }
        for (atom, c) in &e.atoms {
            let t = self.factor_on_atom(x, atom, n);
            out.add_scaled(&t, c);
        }
        Ok(out)
    }

    // ---- products involving opaque atoms: derived atoms ----

    fn atom_product_weight(&self, w: &Weight, atom: &Atom, n: i64) -> Weight {
        w.add(&atom.weight).add_int(-n - 1)
    }

    fn factor_on_atom(&self, x: Factor, atom: &Atom, n: i64) -> FieldExpr<S> {
        let alg = self.alg();
        let name = format!("{}({})", alg.name(x.gen), n);
        let mut torus = atom.torus.clone();
        for (t, u) in torus.iter_mut().zip(alg.info(x.gen).torus.iter()) {
            *t += u;
        }
        let a = atom.derived(
            &name,
            self.atom_product_weight(&x.weight(alg), atom, n),
            torus,
            x.parity(alg).xor(atom.parity),
        );
        FieldExpr::from_atom(a, S::one())
    }

    fn word_on_atom(&self, w: &NOWord, atom: &Atom, n: i64) -> FieldExpr<S> {
        if w.is_one() {
            return if n == -1 {
                FieldExpr::from_atom(atom.clone(), S::one())
            } else {
                FieldExpr::zero()
            };
        }
        let alg = self.alg();
        let name = format!("{}({})", format_word(alg, w), n);
        let mut torus = atom.torus.clone();
        for (t, u) in torus.iter_mut().zip(w.torus(alg).iter()) {
            *t += u;
        }
        let a = atom.derived(
            &name,
            self.atom_product_weight(&w.weight(alg), atom, n),
            torus,
            w.parity(alg).xor(atom.parity),
        );
        FieldExpr::from_atom(a, S::one())
    }

    fn atom_on_word(&self, atom: &Atom, w: &NOWord, n: i64) -> FieldExpr<S> {
        let alg = self.alg();
        let name = format!("(_({})){}", n, format_word(alg, w));
        let mut torus = atom.torus.clone();
        for (t, u) in torus.iter_mut().zip(w.torus(alg).iter()) {
            *t += u;
        }
        let a = atom.derived(
            &name,
            self.atom_product_weight(&w.weight(alg), atom, n),
            torus,
            w.parity(alg).xor(atom.parity),
        );
        FieldExpr::from_atom(a, S::one())
    }

    fn wick_atom(&self, x: Factor, atom: &Atom) -> Atom {
        let alg = self.alg();
        let name = format!("{}(-1)", alg.name(x.gen));
        let mut torus = atom.torus.clone();
        for (t, u) in torus.iter_mut().zip(alg.info(x.gen).torus.iter()) {
            *t += u;
        }
        atom.derived(
            &name,
            self.atom_product_weight(&x.weight(alg), atom, -1),
            torus,
            x.parity(alg).xor(atom.parity),
        )
    }

    fn atom_join_word(&self, atom: &Atom, w: &NOWord) -> FieldExpr<S> {
        let alg = self.alg();
        let name = format!("join:{}", format_word(alg, w));
        let mut torus = atom.torus.clone();
        for (t, u) in torus.iter_mut().zip(w.torus(alg).iter()) {
            *t += u;
        }
        let a = atom.derived(
            &name,
            atom.weight.add(&w.weight(alg)),
            torus,
            w.parity(alg).xor(atom.parity),
        );
        FieldExpr::from_atom(a, S::one())
    }

    fn atom_join_expr(&self, atom: &Atom, e: &FieldExpr<S>) -> FieldExpr<S> {
        let mut out = FieldExpr::zero();
        for (w, c) in &e.terms {
            out.add_scaled(&self.atom_join_word(atom, w), c);
        }
        for (a2, _) in &e.atoms {
            // Atom-atom products never occur in valid computations.
            let a = atom.derived(
                &format!("join:{}", a2.name),
                atom.weight.add(&a2.weight),
                atom.torus.clone(),
                atom.parity.xor(a2.parity),
            );
            out.add_atom(a, S::one());
        }
        out
    }

    // ---- higher-level operations ----

    /// The Jacobi residual
    /// `a_(r)(b_(s)c) - (-1)^{|a||b|} b_(s)(a_(r)c)
    ///  - sum_i C(r,i) (a_(i)b)_(r+s-i) c`; zero in a consistent algebra.
    pub fn jacobi_residual(
        &self,
        a: &FieldExpr<S>,
        b: &FieldExpr<S>,
        c: &FieldExpr<S>,
        r: i64,
        s: i64,
    ) -> VResult<FieldExpr<S>> {
        let pa = a
            .parity(self.alg())
            .ok_or_else(|| VoaError::NotHomogeneous("first Jacobi argument".into()))?;
        let pb = b
            .parity(self.alg())
            .ok_or_else(|| VoaError::NotHomogeneous("second Jacobi argument".into()))?;
        let sign = Parity::sign(pa, pb);
        let bsc = self.nth_product(b, c, s)?;
        let mut out = self.nth_product(a, &bsc, r)?;
        let arc = self.nth_product(a, c, r)?;
        let t2 = self.nth_product(b, &arc, s)?;
        out.add_scaled_rational(&t2, &-sign);
        for i in 0..=r {
            let ab = self.nth_product(a, b, i)?;
            if ab.is_zero() {
                continue;
            }
            let t = self.nth_product(&ab, c, r + s - i)?;
            out.add_scaled_rational(&t, &-binomial(r, i));
        }
        Ok(out)
    }

    /// Scalar coefficient of `target` in the PBW normal form of `e`. Fails
    /// loudly when an unknown atom shares the target's weight and torus
    /// weights, since the extraction would not be closed.
    pub fn extract_coefficient(&self, e: &FieldExpr<S>, target: &NOWord) -> VResult<S> {
        let alg = self.alg();
        let tw = target.weight(alg);
        let tt = target.torus(alg);
        let contaminating: Vec<String> = e
            .atoms
            .keys()
            .filter(|a| a.weight == tw && a.torus == tt)
            .map(|a| a.name.to_string())
            .collect();
        if !contaminating.is_empty() {
            return Err(VoaError::Contaminated(contaminating));
        }
        Ok(e.coefficient(target))
    }
}

fn format_word(alg: &VoaAlgebra, w: &NOWord) -> String {
    format!("{}", w.display(alg))
}
