//! Small polynomial-system solving by successive elimination: linear steps
//! over a scalar field, plus at most one quadratic relation which introduces
//! the formal radical `a3` (never a numeric square root). Every solution
//! branch is returned and substitutes back to exactly zero.

use super::poly::{Monomial, MultiPoly, Var};
use super::quadext::QuadExt;
use super::ratfunc::RatFunc;
use super::scalar::{FieldScalar, Scalar};
use super::{AlgebraError, Result};
use crate::Rational;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};

/// A solution branch. Values are elements of the quadratic extension; they
/// are pure rational functions unless the system required a radical.
#[derive(Clone, Debug)]
pub struct SolveBranch {
    pub values: BTreeMap<Var, QuadExt>,
    /// The unknown that was solved by a quadratic relation, with its square.
    pub radical: Option<(Var, RatFunc)>,
    /// Sign of the radical branch (`true` = `+`).
    pub sign: Option<bool>,
}

/// Polynomial in the unknowns with scalar coefficients.
type UPoly<S> = BTreeMap<Monomial, S>;

fn upoly_add_term<S: Scalar>(p: &mut UPoly<S>, m: Monomial, c: S) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match p.entry(m) {
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

fn upoly_scale<S: Scalar>(p: &UPoly<S>, c: &S) -> UPoly<S> {
    let mut out = UPoly::new();
    for (m, k) in p {
        upoly_add_term(&mut out, m.clone(), k.ref_mul(c));
    }
    out
}

fn upoly_mul<S: Scalar>(a: &UPoly<S>, b: &UPoly<S>) -> UPoly<S> {
    let mut out = UPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            upoly_add_term(&mut out, ma.mul(mb), ca.ref_mul(cb));
        }
    }
    out
}

fn upoly_pow<S: Scalar>(p: &UPoly<S>, e: u32) -> UPoly<S> {
    let mut out = UPoly::new();
    out.insert(Monomial::one(), S::one());
    for _ in 0..e {
        out = upoly_mul(&out, p);
    }
    out
}

/// Substitute `u := value` in `p`.
fn upoly_subst<S: Scalar>(p: &UPoly<S>, u: Var, value: &UPoly<S>) -> UPoly<S> {
    let mut out = UPoly::new();
    for (m, c) in p {
        let e = m.exponent(u);
        if e == 0 {
            upoly_add_term(&mut out, m.clone(), c.clone());
            continue;
        }
        let rest = Monomial::from_pairs(
            m.pairs()
                .iter()
                .filter(|&&(v, _)| v != u)
                .cloned()
                .collect(),
        );
        let vp = upoly_pow(value, e);
        for (mv, cv) in &vp {
            upoly_add_term(&mut out, rest.mul(mv), c.ref_mul(cv));
        }
    }
    out
}

/// Split a polynomial over all variables into a polynomial in the `unknowns`
/// with rational-function coefficients in the remaining variables.
fn split(poly: &MultiPoly, unknowns: &BTreeSet<Var>) -> UPoly<RatFunc> {
    let mut out: UPoly<RatFunc> = UPoly::new();
    for (m, c) in poly.terms() {
        let mut upart = Vec::new();
        let mut ppart = Vec::new();
        for &(v, e) in m.pairs() {
            if unknowns.contains(&v) {
                upart.push((v, e));
            } else {
                ppart.push((v, e));
            }
        }
        let coeff = RatFunc::from_poly(MultiPoly::from_term(
            Monomial::from_pairs(ppart),
            c.clone(),
        ));
        upoly_add_term(&mut out, Monomial::from_pairs(upart), coeff);
    }
    out
}

fn lift(p: &UPoly<RatFunc>) -> UPoly<QuadExt> {
    p.iter()
        .map(|(m, c)| (m.clone(), QuadExt::from_ratfunc(c.clone())))
        .collect()
}

struct Elim<S: FieldScalar> {
    eqs: Vec<UPoly<S>>,
    solved: Vec<(Var, UPoly<S>)>,
    remaining: BTreeSet<Var>,
}

enum StepResult<S: FieldScalar> {
    Progress,
    Quadratic { u: Var, rho_num: S, rho_den: S },
    Stuck,
}

impl<S: FieldScalar> Elim<S> {
    fn check_consistency(&self) -> Result<()> {
        for eq in &self.eqs {
            if eq.len() == 1 {
                if let Some(c) = eq.get(&Monomial::one()) {
                    if !c.is_zero() {
                        return Err(AlgebraError::Inconsistent(format!("{}", c)));
                    }
                }
            }
        }
        Ok(())
    }

    /// One elimination step: prefer a linear solve, otherwise surface a pure
    /// quadratic relation `c2*u^2 + c0 = 0`.
    fn step(&mut self) -> Result<StepResult<S>> {
        self.eqs.retain(|e| !e.is_empty());
        self.check_consistency()?;
        // Linear pass: an equation where some unknown appears exactly as the
        // monomial `u` with a scalar coefficient, and nowhere else.
        for i in 0..self.eqs.len() {
            for &u in self.remaining.iter() {
                let eq = &self.eqs[i];
                let um = Monomial::var(u);
                let coeff = match eq.get(&um) {
                    Some(c) => c.clone(),
                    None => continue,
                };
                if eq
                    .keys()
                    .any(|m| m.exponent(u) > 0 && *m != um)
                {
                    continue;
                }
                let inv = match coeff.inverse() {
                    Some(v) => v,
                    None => continue,
                };
                let mut rest = eq.clone();
                rest.remove(&um);
                let value = upoly_scale(&rest, &inv.ref_neg());
                self.eqs.remove(i);
                self.apply(u, value);
                return Ok(StepResult::Progress);
            }
        }
        // Quadratic pass: monomial support within { 1, u^2 }.
        for eq in &self.eqs {
            for &u in self.remaining.iter() {
                let um2 = Monomial::var_pow(u, 2);
                let c2 = match eq.get(&um2) {
                    Some(c) => c.clone(),
                    None => continue,
                };
                let ok = eq
                    .keys()
                    .all(|m| *m == um2 || m.is_one());
                if !ok || c2.is_zero() {
                    continue;
                }
                let c0 = eq.get(&Monomial::one()).cloned().unwrap_or_else(S::zero);
                return Ok(StepResult::Quadratic {
                    u,
                    rho_num: c0.ref_neg(),
                    rho_den: c2,
                });
            }
        }
        Ok(StepResult::Stuck)
    }

    fn apply(&mut self, u: Var, value: UPoly<S>) {
        self.remaining.remove(&u);
        for eq in self.eqs.iter_mut() {
            *eq = upoly_subst(eq, u, &value);
        }
        for (_, v) in self.solved.iter_mut() {
            *v = upoly_subst(v, u, &value);
        }
        self.solved.push((u, value));
    }

    fn finish(mut self) -> Result<BTreeMap<Var, S>> {
        self.eqs.retain(|e| !e.is_empty());
        self.check_consistency()?;
        if !self.eqs.is_empty() || !self.remaining.is_empty() {
            return Err(AlgebraError::Underdetermined(
                self.remaining.iter().map(|v| v.name().to_string()).collect(),
            ));
        }
        let mut out = BTreeMap::new();
        for (u, v) in self.solved {
            match v.len() {
                0 => {
                    out.insert(u, S::zero());
                }
                1 => {
                    let (m, c) = v.iter().next().unwrap();
                    if !m.is_one() {
                        return Err(AlgebraError::NotSolvable(format!(
                            "value for {} still contains unknowns",
                            u
                        )));
                    }
                    out.insert(u, c.clone());
                }
                _ => {
                    return Err(AlgebraError::NotSolvable(format!(
                        "value for {} still contains unknowns",
                        u
                    )))
                }
            }
        }
        Ok(out)
    }
}

fn run_quadext(mut elim: Elim<QuadExt>) -> Result<BTreeMap<Var, QuadExt>> {
    loop {
        match elim.step()? {
            StepResult::Progress => continue,
            StepResult::Quadratic { .. } => {
                return Err(AlgebraError::SecondRadical(
                    "system needs a second quadratic relation".into(),
                ))
            }
            StepResult::Stuck => return elim.finish(),
        }
    }
}

/// Solve a triangularizable system over the rational functions, allowing one
/// quadratic relation. Returns one branch (no radical) or both sign branches.
pub fn solve_small_system(
    equations: &[MultiPoly],
    unknowns: &[Var],
) -> Result<Vec<SolveBranch>> {
    let uset: BTreeSet<Var> = unknowns.iter().cloned().collect();
    let eqs: Vec<UPoly<RatFunc>> = equations.iter().map(|e| split(e, &uset)).collect();
    let mut elim = Elim {
        eqs,
        solved: Vec::new(),
        remaining: uset.clone(),
    };
    loop {
        match elim.step()? {
            StepResult::Progress => continue,
            StepResult::Stuck => {
                let values = elim.finish()?;
                let branch = SolveBranch {
                    values: values
                        .into_iter()
                        .map(|(v, r)| (v, QuadExt::from_ratfunc(r)))
                        .collect(),
                    radical: None,
                    sign: None,
                };
                verify(equations, &uset, std::slice::from_ref(&branch))?;
                return Ok(vec![branch]);
            }
            StepResult::Quadratic { u, rho_num, rho_den } => {
                let rho = rho_num.div(&rho_den)?;
                let mut branches = Vec::new();
                for sign in [true, false] {
                    let mut lifted = Elim {
                        eqs: elim.eqs.iter().map(lift).collect(),
                        solved: elim
                            .solved
                            .iter()
                            .map(|(v, p)| (*v, lift(p)))
                            .collect(),
                        remaining: elim.remaining.clone(),
                    };
                    let root = QuadExt::radical(rho.clone());
                    let root = if sign { root } else { root.neg() };
                    let mut value = UPoly::new();
                    value.insert(Monomial::one(), root);
                    lifted.apply(u, value);
                    let values = run_quadext(lifted)?;
                    branches.push(SolveBranch {
                        values,
                        radical: Some((u, rho.clone())),
                        sign: Some(sign),
                    });
                }
                verify(equations, &uset, &branches)?;
                return Ok(branches);
            }
        }
    }
}

/// Substitute a branch into the original equations; must vanish identically.
fn verify(
    equations: &[MultiPoly],
    unknowns: &BTreeSet<Var>,
    branches: &[SolveBranch],
) -> Result<()> {
    for branch in branches {
        for eq in equations {
            let mut acc = QuadExt::zero();
            for (m, c) in eq.terms() {
                let mut t = QuadExt::from_ratfunc(RatFunc::constant(c.clone()));
                for &(v, e) in m.pairs() {
                    if unknowns.contains(&v) {
                        let val = branch
                            .values
                            .get(&v)
                            .ok_or_else(|| {
                                AlgebraError::NotSolvable(format!("no value for {}", v))
                            })?;
                        for _ in 0..e {
                            t = t.try_mul(val)?;
                        }
                    } else {
                        let p = RatFunc::from_poly(MultiPoly::from_term(
                            Monomial::var_pow(v, e),
                            Rational::one(),
                        ));
                        t = t.try_mul(&QuadExt::from_ratfunc(p))?;
                    }
                }
                acc = acc.try_add(&t)?;
            }
            if !acc.is_zero() {
                return Err(AlgebraError::NotSolvable(format!(
                    "solution does not annihilate {}; residual {}",
                    eq, acc
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratfunc::parse_poly;

    #[test]
    fn single_linear_equation() {
        // x - 2 = 0
        let eq = parse_poly("x - 2").unwrap();
        let x = Var::new("x");
        let sol = solve_small_system(&[eq], &[x]).unwrap();
        assert_eq!(sol.len(), 1);
        assert_eq!(
            sol[0].values[&x],
            QuadExt::from_ratfunc(RatFunc::from_i64(2))
        );
    }

    #[test]
    fn triangular_linear_system_with_parameters() {
        // x + y - psi = 0, y - 3 = 0  =>  y = 3, x = psi - 3
        let eqs = vec![
            parse_poly("x + y - psi").unwrap(),
            parse_poly("y - 3").unwrap(),
        ];
        let x = Var::new("x");
        let y = Var::new("y");
        let sol = solve_small_system(&eqs, &[x, y]).unwrap();
        assert_eq!(sol.len(), 1);
        let expect = crate::algebra::ratfunc::parse_ratfunc("psi - 3").unwrap();
        assert_eq!(sol[0].values[&x], QuadExt::from_ratfunc(expect));
    }

    #[test]
    fn quadratic_gives_two_formal_branches() {
        // u^2 - psi = 0, w - u = 0
        let eqs = vec![
            parse_poly("u^2 - psi").unwrap(),
            parse_poly("w - u").unwrap(),
        ];
        let u = Var::new("u");
        let w = Var::new("w");
        let sol = solve_small_system(&eqs, &[u, w]).unwrap();
        assert_eq!(sol.len(), 2);
        for b in &sol {
            let (var, rho) = b.radical.as_ref().unwrap();
            assert!(*var == u || *var == w);
            assert_eq!(
                *rho,
                crate::algebra::ratfunc::parse_ratfunc("psi").unwrap()
            );
            assert_eq!(b.values[&u], b.values[&w]);
            assert!(!b.values[&u].is_pure());
        }
        assert_eq!(sol[0].values[&u], sol[1].values[&u].neg());
    }

    #[test]
    fn inconsistent_system_is_reported() {
        let eqs = vec![parse_poly("x - 1").unwrap(), parse_poly("x - 2").unwrap()];
        let x = Var::new("x");
        match solve_small_system(&eqs, &[x]) {
            Err(AlgebraError::Inconsistent(_)) => {}
            other => panic!("expected inconsistency, got {:?}", other),
        }
    }

    #[test]
    fn underdetermined_lists_free_unknowns() {
        let eqs = vec![parse_poly("x + y").unwrap()];
        let x = Var::new("x");
        let y = Var::new("y");
        match solve_small_system(&eqs, &[x, y]) {
            Err(AlgebraError::Underdetermined(free)) => {
                assert_eq!(free.len(), 1);
            }
            other => panic!("expected underdetermined, got {:?}", other),
        }
    }
}
