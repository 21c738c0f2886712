//! Rules and bases as formulas, and back.
//!
//! `rule_to_formula` maps
//!
//! * a fact `C` to `C`,
//! * `P₁ … Pₙ ⇒ C` to `(P₁ ∧ … ∧ Pₙ) → C`,
//! * `[Σ₁]P₁ … [Σₙ]Pₙ ⇒ C` to `((⋀Σ₁ → P₁) ∧ … ∧ (⋀Σₙ → Pₙ)) → C`, where a
//!   premise with empty `Σᵢ` contributes the bare atom `Pᵢ`.
//!
//! Conjunctions are right-nested in canonical order. `formula_to_base` is
//! its left inverse, extended to conjunctions of clause images (rule unions).

use std::collections::BTreeSet;

use crate::atomic::{canonicalize_rule, AtomicRule, Base, RulePremise};
use crate::error::{Error, Result};
use crate::syntax::{Atom, Formula};

fn conjoin(items: impl DoubleEndedIterator<Item = Formula>) -> Option<Formula> {
    items.rev().reduce(|acc, f| Formula::and(f, acc))
}

pub fn rule_to_formula(r: &AtomicRule) -> Formula {
    let conclusion = Formula::Atom(r.conclusion.clone());
    let antecedent = conjoin(r.premises.iter().map(|p| {
        let head = Formula::Atom(p.head.clone());
        match conjoin(p.discharge.iter().cloned().map(Formula::Atom)) {
            None => head,
            Some(sigma) => Formula::implies(sigma, head),
        }
    }));
    match antecedent {
        None => conclusion,
        Some(a) => Formula::implies(a, conclusion),
    }
}

pub fn base_to_formula(b: &Base) -> Result<Formula> {
    conjoin(b.iter().map(rule_to_formula)).ok_or(Error::EmptyBase)
}

/// Flattens an arbitrarily bracketed ∧-tree into its leaves.
fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(l, r) => {
            conjuncts(l, out);
            conjuncts(r, out);
        }
        _ => out.push(f),
    }
}

fn as_atom(f: &Formula) -> Option<&Atom> {
    match f {
        Formula::Atom(a) => Some(a),
        _ => None,
    }
}

fn atom_conjunction(f: &Formula) -> Option<BTreeSet<Atom>> {
    let mut items = Vec::new();
    conjuncts(f, &mut items);
    items.into_iter().map(|g| as_atom(g).cloned()).collect()
}

fn premise_of(f: &Formula) -> Option<RulePremise> {
    match f {
        Formula::Atom(a) => Some(RulePremise::plain(a.clone())),
        Formula::Implies(sigma, head) => Some(RulePremise {
            discharge: atom_conjunction(sigma)?,
            head: as_atom(head)?.clone(),
        }),
        _ => None,
    }
}

/// Inverts a single clause image.
fn clause_to_rule(f: &Formula) -> Result<AtomicRule> {
    let not_clausal = |g: &Formula| Error::FormulaNotClausal(g.to_string());
    match f {
        Formula::Atom(c) => Ok(AtomicRule::fact(c.clone())),
        Formula::Implies(antecedent, conclusion) => {
            let c = as_atom(conclusion).ok_or_else(|| not_clausal(conclusion))?;
            let mut items = Vec::new();
            conjuncts(antecedent, &mut items);
            let premises = items
                .into_iter()
                .map(|g| premise_of(g).ok_or_else(|| not_clausal(g)))
                .collect::<Result<Vec<_>>>()?;
            Ok(canonicalize_rule(premises, c.clone()))
        }
        other => Err(not_clausal(other)),
    }
}

/// The base whose image is `f`. A top-level conjunction of clause images
/// yields the union of their rules.
pub fn formula_to_base(f: &Formula) -> Result<Base> {
    let mut clauses = Vec::new();
    conjuncts(f, &mut clauses);
    clauses.into_iter().map(clause_to_rule).collect()
}

pub fn is_clausal(f: &Formula) -> bool {
    formula_to_base(f).is_ok()
}
