//! The derivability judgment `Γ ⊢_B C`.
//!
//! `closure(B, Γ)` is the least family of atom sets with `Γ ⊆ closure(B, Γ)`
//! and, for every rule `(Σ₁⇒P₁, …, Σₖ⇒Pₖ) ⇒ C` in `B`, `C ∈ closure(B, Γ)`
//! whenever `Pᵢ ∈ closure(B, Γ ∪ Σᵢ)` for all `i`. Larger contexts are
//! resolved recursively (contexts only grow inside a finite vocabulary);
//! within one context we iterate to a fixpoint.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::atomic::{AtomicRule, Base};
use crate::error::{Error, Result};
use crate::syntax::Atom;

/// A set of atoms as a bitmask over an [`AtomIndex`].
pub(crate) type Mask = u128;

pub(crate) const MAX_ATOMS: usize = Mask::BITS as usize;

/// Assigns each atom of a finite vocabulary a bit position.
#[derive(Clone, Debug, Default)]
pub(crate) struct AtomIndex {
    atoms: Vec<Atom>,
    positions: BTreeMap<Atom, usize>,
}

impl AtomIndex {
    pub(crate) fn new<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert!(
            atoms.len() <= MAX_ATOMS,
            "derivability supports at most {MAX_ATOMS} distinct atoms, got {}",
            atoms.len()
        );
        let positions = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        AtomIndex { atoms, positions }
    }

    pub(crate) fn len(&self) -> usize {
        self.atoms.len()
    }

    pub(crate) fn bit(&self, a: &Atom) -> Option<Mask> {
        self.positions.get(a).map(|&i| 1 << i)
    }

    pub(crate) fn mask<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Mask {
        atoms.into_iter().filter_map(|a| self.bit(a)).fold(0, |m, b| m | b)
    }

    pub(crate) fn full(&self) -> Mask {
        if self.atoms.len() == MAX_ATOMS {
            Mask::MAX
        } else {
            (1 << self.atoms.len()) - 1
        }
    }

    pub(crate) fn atoms_in(&self, mask: Mask) -> BTreeSet<Atom> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect()
    }

    /// Compiles a rule. Every atom of the rule must be indexed.
    pub(crate) fn compile(&self, r: &AtomicRule) -> CompiledRule {
        let bit = |a: &Atom| self.bit(a).expect("rule atom missing from index");
        CompiledRule {
            premises: r
                .premises
                .iter()
                .map(|p| (self.mask(&p.discharge), bit(&p.head)))
                .collect(),
            conclusion: bit(&r.conclusion),
        }
    }
}

/// A rule with atoms replaced by bits: `(discharge mask, head bit)` premises.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct CompiledRule {
    pub(crate) premises: Vec<(Mask, Mask)>,
    pub(crate) conclusion: Mask,
}

/// Memoizing closure computation for one compiled rule set.
pub(crate) struct Closure<'r> {
    rules: &'r [CompiledRule],
    memo: HashMap<Mask, Mask>,
}

impl<'r> Closure<'r> {
    pub(crate) fn new(rules: &'r [CompiledRule]) -> Self {
        Closure {
            rules,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn of(&mut self, ctx: Mask) -> Mask {
        if let Some(&c) = self.memo.get(&ctx) {
            return c;
        }
        let mut set = ctx;
        loop {
            let mut changed = false;
            for r in self.rules {
                if set & r.conclusion != 0 {
                    continue;
                }
                let fires = r.premises.iter().all(|&(discharge, head)| {
                    let inner = ctx | discharge;
                    if inner == ctx {
                        set & head != 0
                    } else {
                        self.of(inner) & head != 0
                    }
                });
                if fires {
                    set |= r.conclusion;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.memo.insert(ctx, set);
        set
    }
}

/// Closure at the empty context for a small rule set.
pub(crate) fn closure_at_empty(rules: &[CompiledRule]) -> Mask {
    Closure::new(rules).of(0)
}

fn index_for(b: &Base, extra: impl IntoIterator<Item = Atom>) -> AtomIndex {
    let mut atoms = b.atoms();
    atoms.extend(extra);
    AtomIndex::new(&atoms)
}

/// Is `goal` derivable from the assumptions `gamma` in `b`?
pub fn derives(b: &Base, gamma: &BTreeSet<Atom>, goal: &Atom) -> bool {
    if gamma.contains(goal) {
        return true;
    }
    // assumptions outside the base's atoms cannot feed any rule
    let idx = index_for(b, [goal.clone()]);
    let rules: Vec<CompiledRule> = b.iter().map(|r| idx.compile(r)).collect();
    let ctx = idx.mask(gamma);
    let goal_bit = idx.bit(goal).expect("goal indexed");
    Closure::new(&rules).of(ctx) & goal_bit != 0
}

/// `{ P ∈ vocab : Γ ⊢_B P }`.
pub fn derivable_set(b: &Base, gamma: &BTreeSet<Atom>, vocab: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    let idx = index_for(b, vocab.iter().cloned());
    let rules: Vec<CompiledRule> = b.iter().map(|r| idx.compile(r)).collect();
    let closed = Closure::new(&rules).of(idx.mask(gamma));
    let mut out: BTreeSet<Atom> = idx.atoms_in(closed).intersection(vocab).cloned().collect();
    out.extend(gamma.intersection(vocab).cloned());
    out
}

pub const DEFAULT_CONTEXT_CAP: u128 = 1 << 16;

/// Independent oracle: naive inflationary iteration over *every* context of
/// the vocabulary `atoms(b) ∪ gamma` simultaneously, until nothing changes.
pub fn brute_closure(b: &Base, gamma: &BTreeSet<Atom>) -> Result<BTreeSet<Atom>> {
    brute_closure_with_cap(b, gamma, DEFAULT_CONTEXT_CAP)
}

pub fn brute_closure_with_cap(
    b: &Base,
    gamma: &BTreeSet<Atom>,
    cap: u128,
) -> Result<BTreeSet<Atom>> {
    let mut vocab: Vec<Atom> = b.atoms().into_iter().collect();
    for a in gamma {
        if !vocab.contains(a) {
            vocab.push(a.clone());
        }
    }
    vocab.sort();
    let n = vocab.len();
    let contexts: u128 = if n >= 127 { u128::MAX } else { 1u128 << n };
    if contexts > cap {
        return Err(Error::VocabularyTooLarge { atoms: n, contexts, cap });
    }
    let pos = |a: &Atom| vocab.binary_search(a).expect("atom in vocabulary");
    let to_mask = |atoms: &BTreeSet<Atom>| atoms.iter().fold(0usize, |m, a| m | 1 << pos(a));
    let rules: Vec<(Vec<(usize, usize)>, usize)> = b
        .iter()
        .map(|r| {
            let prem = r
                .premises
                .iter()
                .map(|p| (to_mask(&p.discharge), pos(&p.head)))
                .collect();
            (prem, pos(&r.conclusion))
        })
        .collect();

    // table[ctx] holds the atoms derived so far under context ctx, as a bool row
    let contexts = contexts as usize;
    let mut table: Vec<Vec<bool>> = (0..contexts)
        .map(|ctx| (0..n).map(|i| ctx & (1 << i) != 0).collect())
        .collect();
    loop {
        let snapshot = table.clone();
        let mut changed = false;
        for (ctx, row) in table.iter_mut().enumerate() {
            for (premises, concl) in &rules {
                if row[*concl] {
                    continue;
                }
                if premises
                    .iter()
                    .all(|&(discharge, head)| snapshot[ctx | discharge][head])
                {
                    row[*concl] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let row = &table[to_mask(gamma)];
    Ok(vocab
        .iter()
        .enumerate()
        .filter(|(i, _)| row[*i])
        .map(|(_, a)| a.clone())
        .collect())
}

/// A witness derivation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derivation {
    /// An open assumption (from `Γ` or a discharged hypothesis).
    Hypothesis(Atom),
    Step {
        rule: AtomicRule,
        /// One subderivation per premise, with the atoms that premise discharges.
        premises: Vec<(BTreeSet<Atom>, Derivation)>,
    },
}

impl Derivation {
    pub fn conclusion(&self) -> &Atom {
        match self {
            Derivation::Hypothesis(a) => a,
            Derivation::Step { rule, .. } => &rule.conclusion,
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Derivation::Hypothesis(_) => 0,
            Derivation::Step { premises, .. } => {
                1 + premises.iter().map(|(_, d)| d.height()).max().unwrap_or(0)
            }
        }
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            Derivation::Hypothesis(a) => writeln!(f, "{pad}{a}  [hypothesis]"),
            Derivation::Step { rule, premises } => {
                writeln!(f, "{pad}{}  by {rule}", rule.conclusion)?;
                for (discharged, d) in premises {
                    if !discharged.is_empty() {
                        let names: Vec<&str> = discharged.iter().map(Atom::name).collect();
                        writeln!(f, "{pad}  discharging [{}]:", names.join(" "))?;
                    }
                    d.write_indented(f, depth + 1)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

/// Reconstructs one derivation of `goal` from `gamma`, if any exists.
pub fn derivation_trace(b: &Base, gamma: &BTreeSet<Atom>, goal: &Atom) -> Option<Derivation> {
    let idx = index_for(b, gamma.iter().cloned().chain([goal.clone()]));
    let rules: Vec<&AtomicRule> = b.iter().collect();
    let compiled: Vec<CompiledRule> = rules.iter().map(|r| idx.compile(r)).collect();
    let mut tracer = Tracer {
        rules: &compiled,
        justification: HashMap::new(),
    };
    let ctx = idx.mask(gamma);
    let goal_bit = idx.bit(goal)?;
    if tracer.closure(ctx) & goal_bit == 0 {
        return None;
    }
    Some(tracer.rebuild(&idx, &rules, ctx, goal_bit))
}

struct Tracer<'r> {
    rules: &'r [CompiledRule],
    /// context -> (closure, which rule first added each atom)
    justification: HashMap<Mask, (Mask, HashMap<Mask, usize>)>,
}

impl Tracer<'_> {
    fn closure(&mut self, ctx: Mask) -> Mask {
        if let Some((c, _)) = self.justification.get(&ctx) {
            return *c;
        }
        let mut set = ctx;
        let mut why = HashMap::new();
        loop {
            let mut changed = false;
            for (i, r) in self.rules.iter().enumerate() {
                if set & r.conclusion != 0 {
                    continue;
                }
                let fires = r.premises.iter().all(|&(discharge, head)| {
                    let inner = ctx | discharge;
                    if inner == ctx {
                        set & head != 0
                    } else {
                        self.closure(inner) & head != 0
                    }
                });
                if fires {
                    set |= r.conclusion;
                    why.insert(r.conclusion, i);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.justification.insert(ctx, (set, why));
        set
    }

    fn rebuild(&mut self, idx: &AtomIndex, rules: &[&AtomicRule], ctx: Mask, atom: Mask) -> Derivation {
        if ctx & atom != 0 {
            let a = idx.atoms_in(atom).into_iter().next().expect("single atom");
            return Derivation::Hypothesis(a);
        }
        self.closure(ctx);
        let i = self.justification[&ctx].1[&atom];
        let rule = rules[i].clone();
        let premises = rule
            .premises
            .iter()
            .map(|p| {
                let inner = ctx | idx.mask(&p.discharge);
                let head = idx.bit(&p.head).expect("indexed");
                (p.discharge.clone(), self.rebuild(idx, rules, inner, head))
            })
            .collect();
        Derivation::Step { rule, premises }
    }
}
