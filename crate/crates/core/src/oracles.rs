//! Independent classical and intuitionistic validity checkers, and the
//! comparison of base-extension validity against them.
//!
//! The intuitionistic checker is a contraction-free sequent calculus (G4ip):
//! every rule instance makes the sequent smaller in a well-founded multiset
//! order, so plain backtracking search terminates.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::atomic::{Base, BasisLevel, BasisSpec};
use crate::error::{Error, Result};
use crate::support::{Stats, Strategy, SupportContext};
use crate::syntax::{Atom, Formula};

/// Plain propositional formulas.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StandardFormula {
    Atom(Atom),
    Falsum,
    And(Box<StandardFormula>, Box<StandardFormula>),
    Or(Box<StandardFormula>, Box<StandardFormula>),
    Implies(Box<StandardFormula>, Box<StandardFormula>),
}

use StandardFormula as S;

impl StandardFormula {
    pub fn and(a: S, b: S) -> S {
        S::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: S, b: S) -> S {
        S::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: S, b: S) -> S {
        S::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(a: S) -> S {
        S::implies(a, S::Falsum)
    }

    pub fn atom(name: &str) -> S {
        S::Atom(Atom::new(name).expect("valid atom name"))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            S::Atom(a) => {
                out.insert(a.clone());
            }
            S::Falsum => {}
            S::And(a, b) | S::Or(a, b) | S::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            S::Implies(..) => 1,
            S::Or(..) => 2,
            S::And(..) => 3,
            S::Atom(_) | S::Falsum => 4,
        }
    }

    /// Truth value under the assignment making exactly `true_atoms` true.
    pub fn eval(&self, true_atoms: &BTreeSet<Atom>) -> bool {
        match self {
            S::Atom(a) => true_atoms.contains(a),
            S::Falsum => false,
            S::And(a, b) => a.eval(true_atoms) && b.eval(true_atoms),
            S::Or(a, b) => a.eval(true_atoms) || b.eval(true_atoms),
            S::Implies(a, b) => !a.eval(true_atoms) || b.eval(true_atoms),
        }
    }
}

impl fmt::Display for StandardFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r, op) = match self {
            S::Atom(a) => return write!(f, "{a}"),
            S::Falsum => return f.write_str("⊥"),
            S::And(l, r) => (l, r, "∧"),
            S::Or(l, r) => (l, r, "∨"),
            S::Implies(l, r) => (l, r, "⊃"),
        };
        let own = self.precedence();
        let implication = own == 1;
        let wrap_l = if implication { l.precedence() <= own } else { l.precedence() < own };
        let wrap_r = if implication { r.precedence() < own } else { r.precedence() <= own };
        let side = |f: &mut fmt::Formatter<'_>, g: &S, wrap: bool| {
            if wrap {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        };
        side(f, l, wrap_l)?;
        write!(f, " {op} ")?;
        side(f, r, wrap_r)
    }
}

/// ⊸ ↦ ⊃, ⊗ and ∧ ↦ ∧, ⊕ and ∨ ↦ ∨, 0 ↦ ⊥.
pub fn map_extrinsic(f: &Formula) -> Result<StandardFormula> {
    Ok(match f {
        Formula::Atom(a) => S::Atom(a.clone()),
        Formula::Zero => S::Falsum,
        Formula::Bot => return Err(Error::UnmappableConnective("⊥")),
        Formula::Implies(..) => return Err(Error::UnmappableConnective("→")),
        Formula::Lolli(a, b) => S::implies(map_extrinsic(a)?, map_extrinsic(b)?),
        Formula::And(a, b) | Formula::Tensor(a, b) => S::and(map_extrinsic(a)?, map_extrinsic(b)?),
        Formula::Or(a, b) | Formula::Oplus(a, b) => S::or(map_extrinsic(a)?, map_extrinsic(b)?),
    })
}

pub const MAX_CLASSICAL_ATOMS: usize = 20;

pub fn classical_valid(f: &StandardFormula) -> Result<bool> {
    let atoms: Vec<Atom> = f.atoms().into_iter().collect();
    if atoms.len() > MAX_CLASSICAL_ATOMS {
        return Err(Error::TooManyAtoms {
            atoms: atoms.len(),
            limit: MAX_CLASSICAL_ATOMS,
        });
    }
    Ok((0u32..1 << atoms.len()).all(|row| {
        let true_atoms = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| row >> i & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect();
        f.eval(&true_atoms)
    }))
}

pub fn intuitionistic_valid(f: &StandardFormula) -> bool {
    Prover::default().prove(BTreeSet::new(), f.clone())
}

type Context = BTreeSet<StandardFormula>;

#[derive(Default)]
struct Prover {
    memo: HashMap<(Context, StandardFormula), bool>,
}

impl Prover {
    fn prove(&mut self, gamma: Context, goal: S) -> bool {
        let key = (gamma, goal);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.search(key.0.clone(), key.1.clone());
        self.memo.insert(key, v);
        v
    }

    fn search(&mut self, mut gamma: Context, goal: S) -> bool {
        if gamma.contains(&S::Falsum) || gamma.contains(&goal) {
            return true;
        }

        // invertible right rules
        match goal {
            S::And(a, b) => {
                return self.prove(gamma.clone(), *a) && self.prove(gamma, *b);
            }
            S::Implies(a, b) => {
                gamma.insert(*a);
                return self.prove(gamma, *b);
            }
            _ => {}
        }

        // invertible left rules: pick the first applicable hypothesis
        let invertible = gamma.iter().find(|h| match h {
            S::And(..) | S::Or(..) => true,
            S::Implies(a, _) => match &**a {
                S::Atom(p) => gamma.contains(&S::Atom(p.clone())),
                S::Falsum | S::And(..) | S::Or(..) => true,
                S::Implies(..) => false,
            },
            _ => false,
        });
        if let Some(h) = invertible.cloned() {
            gamma.remove(&h);
            return match h {
                S::And(a, b) => {
                    gamma.insert(*a);
                    gamma.insert(*b);
                    self.prove(gamma, goal)
                }
                S::Or(a, b) => {
                    let mut left = gamma.clone();
                    left.insert(*a);
                    gamma.insert(*b);
                    self.prove(left, goal.clone()) && self.prove(gamma, goal)
                }
                S::Implies(a, b) => {
                    match *a {
                        S::Atom(_) => {
                            gamma.insert(*b);
                        }
                        S::Falsum => {}
                        S::And(c, d) => {
                            gamma.insert(S::implies(*c, S::implies(*d, *b)));
                        }
                        S::Or(c, d) => {
                            gamma.insert(S::implies(*c, (*b).clone()));
                            gamma.insert(S::implies(*d, *b));
                        }
                        S::Implies(..) => unreachable!("not selected as invertible"),
                    }
                    self.prove(gamma, goal)
                }
                _ => unreachable!("not selected as invertible"),
            };
        }

        // non-invertible rules
        if let S::Or(a, b) = &goal {
            if self.prove(gamma.clone(), (**a).clone()) || self.prove(gamma.clone(), (**b).clone()) {
                return true;
            }
        }
        let nested: Vec<S> = gamma
            .iter()
            .filter(|h| matches!(h, S::Implies(a, _) if matches!(**a, S::Implies(..))))
            .cloned()
            .collect();
        for h in nested {
            let S::Implies(cd, b) = &h else { unreachable!() };
            let S::Implies(c, d) = &**cd else { unreachable!() };
            let mut rest = gamma.clone();
            rest.remove(&h);
            let mut first = rest.clone();
            first.insert(S::implies((**d).clone(), (**b).clone()));
            let sub_goal = S::implies((**c).clone(), (**d).clone());
            if self.prove(first, sub_goal) {
                let mut second = rest;
                second.insert((**b).clone());
                if self.prove(second, goal.clone()) {
                    return true;
                }
            }
        }
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Classical,
    Intuitionistic,
}

impl OracleKind {
    pub fn for_level(level: BasisLevel) -> Self {
        match level {
            BasisLevel::One => OracleKind::Classical,
            BasisLevel::Two => OracleKind::Intuitionistic,
        }
    }

    pub fn decide(self, f: &StandardFormula) -> Result<bool> {
        match self {
            OracleKind::Classical => classical_valid(f),
            OracleKind::Intuitionistic => Ok(intuitionistic_valid(f)),
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::Classical => "classical",
            OracleKind::Intuitionistic => "intuitionistic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub formula: Formula,
    pub mapped: StandardFormula,
    pub support_valid: bool,
    pub oracle: OracleKind,
    pub oracle_valid: bool,
    pub agree: bool,
    /// The first unsupporting base when the formula is not valid.
    pub countermodel: Option<Base>,
    /// Fresh atoms in the vocabulary the verdict was computed under.
    pub fresh: usize,
    /// Work done by the context(s) behind this verdict.
    pub stats: Stats,
}

/// Compares validity in `ctx` with the oracle matching its basis level.
pub fn compare(ctx: &SupportContext, f: &Formula) -> Result<Comparison> {
    let mapped = map_extrinsic(f)?;
    let oracle = OracleKind::for_level(ctx.spec().level);
    let oracle_valid = oracle.decide(&mapped)?;
    let support_valid = ctx.valid(f)?;
    let countermodel = if support_valid { None } else { ctx.countermodel(f)? };
    let fresh = ctx.spec().vocab.iter().filter(|a| a.is_reserved()).count();
    Ok(Comparison {
        formula: f.clone(),
        mapped,
        support_valid,
        oracle,
        oracle_valid,
        agree: support_valid == oracle_valid,
        countermodel,
        fresh,
        stats: ctx.stats(),
    })
}

/// Compares over the atoms of `f` plus `fresh` fresh atoms; on disagreement
/// retries with one more fresh atom, up to `max_fresh`. Returns the last
/// comparison that could be computed, and the error that stopped a retry.
pub fn compare_with_fallback(
    template: &BasisSpec,
    f: &Formula,
    fresh: usize,
    max_fresh: usize,
    strategy: Strategy,
    max_enum: u128,
) -> Result<(Comparison, Option<Error>)> {
    map_extrinsic(f)?;
    let mut last: Option<Comparison> = None;
    let mut spent = Stats::default();
    for n in fresh..=max_fresh.max(fresh) {
        let attempt = SupportContext::covering(template, &[f], &[], n, strategy, max_enum)
            .and_then(|ctx| compare(&ctx, f))
            .map(|mut c| {
                spent.bases_enumerated += c.stats.bases_enumerated;
                spent.cache_hits += c.stats.cache_hits;
                c.stats = spent;
                c
            });
        match (attempt, last.take()) {
            (Ok(c), _) if c.agree => return Ok((c, None)),
            (Ok(c), _) => last = Some(c),
            (Err(e), None) => return Err(e),
            (Err(e), Some(c)) => return Ok((c, Some(e))),
        }
    }
    Ok((last.expect("at least one attempt"), None))
}

/// Compares every formula under one shared context.
pub fn compare_all(ctx: &SupportContext, formulas: &[Formula]) -> Result<Vec<Comparison>> {
    formulas.iter().map(|f| compare(ctx, f)).collect()
}

/// Verdict counts by agreement, for reports.
pub fn tally(rows: &[Comparison]) -> BTreeMap<&'static str, usize> {
    let mut out = BTreeMap::from([("agree", 0), ("disagree", 0)]);
    for r in rows {
        *out.get_mut(if r.agree { "agree" } else { "disagree" }).expect("key") += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn s(text: &str) -> StandardFormula {
        map_extrinsic(&parse_formula(text).unwrap()).unwrap()
    }

    #[test]
    fn mapping() {
        assert_eq!(s("p -o (q + zero)").to_string(), "p ⊃ q ∨ ⊥");
        assert_eq!(s("p * q"), s("p & q"));
        assert_eq!(
            map_extrinsic(&parse_formula("p -> q").unwrap()),
            Err(Error::UnmappableConnective("→"))
        );
        assert_eq!(
            map_extrinsic(&parse_formula("p -o bot").unwrap()),
            Err(Error::UnmappableConnective("⊥"))
        );
    }

    #[test]
    fn classical() {
        assert!(classical_valid(&s("((p -o q) -o p) -o p")).unwrap());
        assert!(!classical_valid(&s("p -o q")).unwrap());
        assert!(classical_valid(&s("((p -o zero) -o zero) -o p")).unwrap());
        let wide = (0..21)
            .map(|i| S::atom(&format!("a{i}")))
            .reduce(S::and)
            .unwrap();
        assert!(matches!(classical_valid(&wide), Err(Error::TooManyAtoms { atoms: 21, .. })));
    }

    #[test]
    fn intuitionistic() {
        for valid in [
            "p -o p",
            "p & q -o q & p",
            "p | q -o q | p",
            "zero -o p",
            "((p | (p -o zero)) -o zero) -o zero",
            "(p -o q) -o (q -o r) -o p -o r",
            "((p -o q) -o q) -o ((q -o p) -o p) -o ((p -o q) -o q)",
        ] {
            assert!(intuitionistic_valid(&s(valid)), "{valid}");
        }
        for invalid in [
            "p",
            "p -o q",
            "((p -o q) -o p) -o p",
            "((p -o zero) -o zero) -o p",
            "p | (p -o zero)",
            "(p -o (q | r)) -o ((p -o q) | (p -o r))",
            "(p -o q) | (q -o p)",
        ] {
            assert!(!intuitionistic_valid(&s(invalid)), "{invalid}");
        }
    }
}
