//! Atomic rules, bases and bounded basis classes.
//!
//! A base is a finite set of atomic rules. A [`BasisSpec`] fixes a finite
//! vocabulary and size bounds; the bases it admits are exactly the subsets
//! of [`rule_universe`] with at most `max_rules` elements.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Atom, Scanner};

/// One premise of a rule: the atom `head`, derived under the discharged
/// hypotheses `discharge`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RulePremise {
    pub discharge: BTreeSet<Atom>,
    pub head: Atom,
}

impl RulePremise {
    pub fn plain(head: Atom) -> Self {
        RulePremise {
            discharge: BTreeSet::new(),
            head,
        }
    }

    pub fn new(discharge: impl IntoIterator<Item = Atom>, head: Atom) -> Self {
        RulePremise {
            discharge: discharge.into_iter().collect(),
            head,
        }
    }
}

/// An atomic rule of level 0, 1 or 2. Premises form a set, so construction
/// is canonical: duplicates vanish and order is irrelevant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomicRule {
    pub premises: BTreeSet<RulePremise>,
    pub conclusion: Atom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleLevel {
    Zero = 0,
    One = 1,
    Two = 2,
}

impl AtomicRule {
    pub fn fact(conclusion: Atom) -> Self {
        AtomicRule {
            premises: BTreeSet::new(),
            conclusion,
        }
    }

    pub fn level(&self) -> RuleLevel {
        level_of(self)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out: BTreeSet<Atom> = [self.conclusion.clone()].into();
        for p in &self.premises {
            out.insert(p.head.clone());
            out.extend(p.discharge.iter().cloned());
        }
        out
    }
}

/// Build a rule from an arbitrary premise list. Idempotent.
pub fn canonicalize_rule(
    premises: impl IntoIterator<Item = RulePremise>,
    conclusion: Atom,
) -> AtomicRule {
    AtomicRule {
        premises: premises.into_iter().collect(),
        conclusion,
    }
}

/// The least level at which the rule exists.
pub fn level_of(r: &AtomicRule) -> RuleLevel {
    if r.premises.is_empty() {
        RuleLevel::Zero
    } else if r.premises.iter().all(|p| p.discharge.is_empty()) {
        RuleLevel::One
    } else {
        RuleLevel::Two
    }
}

impl fmt::Display for AtomicRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.premises.is_empty() {
            return write!(f, "fact {}.", self.conclusion);
        }
        f.write_str("rule ")?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if !p.discharge.is_empty() {
                write!(f, "[{}] ", p.discharge.iter().join(" "))?;
            }
            write!(f, "{}", p.head)?;
        }
        write!(f, " => {}.", self.conclusion)
    }
}

/// A knowledge base: a canonical set of atomic rules.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Base {
    rules: BTreeSet<AtomicRule>,
}

impl Base {
    pub fn new() -> Self {
        Base::default()
    }

    pub fn rules(&self) -> &BTreeSet<AtomicRule> {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn insert(&mut self, rule: AtomicRule) -> bool {
        self.rules.insert(rule)
    }

    pub fn contains(&self, rule: &AtomicRule) -> bool {
        self.rules.contains(rule)
    }

    pub fn is_subset(&self, other: &Base) -> bool {
        self.rules.is_subset(&other.rules)
    }

    pub fn union(&self, other: &Base) -> Base {
        self.rules.union(&other.rules).cloned().collect()
    }

    /// Highest rule level, or `None` for the empty base.
    pub fn level(&self) -> Option<RuleLevel> {
        self.rules.iter().map(level_of).max()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.rules.iter().flat_map(AtomicRule::atoms).collect()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &AtomicRule> + ExactSizeIterator {
        self.rules.iter()
    }
}

impl FromIterator<AtomicRule> for Base {
    fn from_iter<I: IntoIterator<Item = AtomicRule>>(iter: I) -> Self {
        Base {
            rules: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Base {
    type Item = &'a AtomicRule;
    type IntoIter = std::collections::btree_set::Iter<'a, AtomicRule>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Render in `.base` format, one statement per line.
pub fn render_base(b: &Base) -> String {
    b.to_string()
}

impl FromStr for Base {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_base(s)
    }
}

/// Parse the `.base` format:
///
/// ```text
/// # comment
/// fact c.
/// rule p, q => c.
/// rule [p1 p2] q, [r] s, t => c.
/// ```
pub fn parse_base(text: &str) -> Result<Base> {
    let mut sc = Scanner::new(text);
    let mut base = Base::new();
    loop {
        sc.skip_ws_and_comments();
        if sc.at_end() {
            return Ok(base);
        }
        if sc.eat_word("fact") {
            let c = expect_atom(&mut sc)?;
            expect_token(&mut sc, ".", &["."])?;
            base.insert(AtomicRule::fact(c));
        } else if sc.eat_word("rule") {
            let mut premises = Vec::new();
            loop {
                sc.skip_ws_and_comments();
                let mut discharge = BTreeSet::new();
                if sc.eat("[") {
                    loop {
                        sc.skip_ws_and_comments();
                        if sc.eat("]") {
                            break;
                        }
                        discharge.insert(expect_atom(&mut sc)?);
                    }
                }
                premises.push(RulePremise {
                    discharge,
                    head: expect_atom(&mut sc)?,
                });
                sc.skip_ws_and_comments();
                if sc.eat(",") {
                    continue;
                }
                if sc.eat("=>") {
                    break;
                }
                return Err(sc.error(&[",", "=>"]));
            }
            let c = expect_atom(&mut sc)?;
            expect_token(&mut sc, ".", &["."])?;
            base.insert(canonicalize_rule(premises, c));
        } else {
            return Err(sc.error(&["fact", "rule", "end of input"]));
        }
    }
}

fn expect_atom(sc: &mut Scanner<'_>) -> Result<Atom> {
    sc.skip_ws_and_comments();
    let start = sc.pos();
    match sc.ident().map(Atom::new) {
        Some(Ok(a)) => Ok(a),
        _ => {
            sc.set_pos(start);
            Err(sc.error(&["atom"]))
        }
    }
}

fn expect_token(sc: &mut Scanner<'_>, tok: &str, expected: &[&str]) -> Result<()> {
    sc.skip_ws_and_comments();
    if sc.eat(tok) {
        Ok(())
    } else {
        Err(sc.error(expected))
    }
}

/// Which rule levels a basis admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLevel {
    /// Zeroth- and first-level rules.
    #[serde(rename = "b1")]
    One,
    /// Zeroth-, first- and second-level rules.
    #[serde(rename = "b2")]
    Two,
}

impl fmt::Display for BasisLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisLevel::One => "b1",
            BasisLevel::Two => "b2",
        })
    }
}

impl FromStr for BasisLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b1" | "1" => Ok(BasisLevel::One),
            "b2" | "2" => Ok(BasisLevel::Two),
            _ => Err(Error::InvalidConfig(format!("unknown basis `{s}`"))),
        }
    }
}

/// A finite basis: vocabulary, admitted rule level and size bounds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisSpec {
    pub vocab: BTreeSet<Atom>,
    pub level: BasisLevel,
    pub max_premises: usize,
    /// Ignored (treated as 0) for [`BasisLevel::One`].
    pub max_discharge: usize,
    /// `None` admits every subset of the rule universe.
    pub max_rules: Option<usize>,
}

impl BasisSpec {
    pub fn new(vocab: impl IntoIterator<Item = Atom>, level: BasisLevel) -> Self {
        BasisSpec {
            vocab: vocab.into_iter().collect(),
            level,
            max_premises: 2,
            max_discharge: 1,
            max_rules: Some(3),
        }
    }

    pub fn with_max_premises(mut self, n: usize) -> Self {
        self.max_premises = n;
        self
    }

    pub fn with_max_discharge(mut self, n: usize) -> Self {
        self.max_discharge = n;
        self
    }

    pub fn with_max_rules(mut self, n: Option<usize>) -> Self {
        self.max_rules = n;
        self
    }

    /// Adds `n` fresh atoms `_f1.._fn`, skipping names already in the vocabulary.
    pub fn with_fresh(mut self, n: usize) -> Self {
        let mut added = 0;
        let mut i = 1;
        while added < n {
            if self.vocab.insert(Atom::fresh(i)) {
                added += 1;
            }
            i += 1;
        }
        self
    }

    pub fn effective_max_discharge(&self) -> usize {
        match self.level {
            BasisLevel::One => 0,
            BasisLevel::Two => self.max_discharge,
        }
    }

    /// Whether `r` belongs to the rule universe of this spec.
    pub fn admits_rule(&self, r: &AtomicRule) -> bool {
        let level_ok = match self.level {
            BasisLevel::One => level_of(r) <= RuleLevel::One,
            BasisLevel::Two => true,
        };
        level_ok
            && r.premises.len() <= self.max_premises
            && r.premises
                .iter()
                .all(|p| p.discharge.len() <= self.effective_max_discharge())
            && r.atoms().is_subset(&self.vocab)
    }

    /// Whether `b` belongs to the induced basis.
    pub fn admits_base(&self, b: &Base) -> bool {
        self.check_base(b).is_ok()
    }

    pub(crate) fn check_base(&self, b: &Base) -> Result<()> {
        if let Some(bad) = b.iter().find(|r| !self.admits_rule(r)) {
            return Err(Error::BaseOutsideBasis(format!(
                "rule `{bad}` is outside the rule universe"
            )));
        }
        if let Some(max) = self.max_rules {
            if b.len() > max {
                return Err(Error::BaseOutsideBasis(format!(
                    "{} rules exceeds max_rules = {max}",
                    b.len()
                )));
            }
        }
        Ok(())
    }

    /// Number of rules in the universe, computed without materializing it.
    pub fn universe_size(&self) -> u128 {
        let n = self.vocab.len() as u128;
        let discharge_sets: u128 = (0..=self.effective_max_discharge().min(self.vocab.len()))
            .map(|k| binomial(n, k as u128))
            .sum();
        let kinds = discharge_sets * n;
        let premise_sets: u128 = (0..=(self.max_premises as u128).min(kinds))
            .map(|k| binomial(kinds, k))
            .sum();
        premise_sets.saturating_mul(n)
    }

    /// Number of bases in the induced basis.
    pub fn basis_size(&self) -> u128 {
        extension_count(self.universe_size(), 0, self.max_rules)
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of bases in the basis that extend a base of `base_len` rules.
pub(crate) fn extension_count(universe: u128, base_len: usize, max_rules: Option<usize>) -> u128 {
    let free = universe.saturating_sub(base_len as u128);
    let depth = match max_rules {
        None => free,
        Some(m) => (m.saturating_sub(base_len) as u128).min(free),
    };
    (0..=depth).fold(0u128, |acc, k| acc.saturating_add(binomial(free, k)))
}

/// Every rule over `spec.vocab` within the spec's bounds, in canonical order.
pub fn rule_universe(spec: &BasisSpec) -> Vec<AtomicRule> {
    let vocab: Vec<&Atom> = spec.vocab.iter().collect();
    let max_d = spec.effective_max_discharge().min(vocab.len());
    let premise_kinds: Vec<RulePremise> = (0..=max_d)
        .flat_map(|k| vocab.iter().copied().combinations(k))
        .flat_map(|discharge| {
            vocab
                .iter()
                .map(move |&head| RulePremise::new(discharge.iter().copied().cloned(), head.clone()))
        })
        .collect();
    let max_p = spec.max_premises.min(premise_kinds.len());
    let premise_sets: Vec<Vec<&RulePremise>> = (0..=max_p)
        .flat_map(|k| premise_kinds.iter().combinations(k))
        .collect();
    let mut rules: Vec<AtomicRule> = premise_sets
        .iter()
        .flat_map(|ps| {
            vocab
                .iter()
                .map(move |&c| canonicalize_rule(ps.iter().map(|&p| p.clone()), c.clone()))
        })
        .collect();
    rules.sort();
    rules.dedup();
    rules
}

/// All bases of the basis that extend `b` (including `b`), ordered by size,
/// then lexicographically by rule-universe position.
pub fn enumerate_extensions(
    spec: &BasisSpec,
    b: &Base,
) -> Result<impl Iterator<Item = Base> + use<>> {
    spec.check_base(b)?;
    let free: Vec<AtomicRule> = rule_universe(spec)
        .into_iter()
        .filter(|r| !b.contains(r))
        .collect();
    let depth = spec
        .max_rules
        .map_or(free.len(), |m| m.saturating_sub(b.len()).min(free.len()));
    let root = b.clone();
    Ok((0..=depth).flat_map(move |k| {
        let root = root.clone();
        free.clone()
            .into_iter()
            .combinations(k)
            .map(move |extra| root.union(&extra.into_iter().collect()))
    }))
}

/// Every base of the basis.
pub fn enumerate_basis(spec: &BasisSpec) -> impl Iterator<Item = Base> + use<> {
    enumerate_extensions(spec, &Base::new()).expect("the empty base is in every basis")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn vocab(names: &[&str]) -> Vec<Atom> {
        names.iter().map(|s| at(s)).collect()
    }

    #[test]
    fn canonicalize_dedups_and_sorts() {
        let r = canonicalize_rule(
            [
                RulePremise::plain(at("q")),
                RulePremise::plain(at("p")),
                RulePremise::plain(at("p")),
            ],
            at("c"),
        );
        let premises: Vec<_> = r.premises.iter().map(|p| p.head.name()).collect();
        assert_eq!(premises, ["p", "q"]);
        assert_eq!(canonicalize_rule(r.premises.clone(), r.conclusion.clone()), r);
    }

    #[test]
    fn levels() {
        assert_eq!(level_of(&AtomicRule::fact(at("c"))), RuleLevel::Zero);
        let r1 = canonicalize_rule([RulePremise::plain(at("p")), RulePremise::plain(at("q"))], at("c"));
        assert_eq!(level_of(&r1), RuleLevel::One);
        let r2 = canonicalize_rule([RulePremise::new([at("p")], at("q"))], at("c"));
        assert_eq!(level_of(&r2), RuleLevel::Two);
        // empty discharges collapse onto the level-1 rule
        let r2_flat = canonicalize_rule([RulePremise::new([], at("p")), RulePremise::new([], at("q"))], at("c"));
        assert_eq!(r2_flat, r1);
    }

    #[test]
    fn parent_rule_instance() {
        let r = canonicalize_rule(
            [
                RulePremise::new([at("fa")], at("old")),
                RulePremise::new([at("mo")], at("old")),
                RulePremise::plain(at("par")),
            ],
            at("old"),
        );
        assert_eq!(r.level(), RuleLevel::Two);
        assert_eq!(r.to_string(), "rule par, [fa] old, [mo] old => old.");
    }

    #[test]
    fn universe_counts() {
        let s = BasisSpec::new(vocab(&["p", "q"]), BasisLevel::One).with_max_premises(2);
        let u = rule_universe(&s);
        assert_eq!(u.len(), 8);
        assert_eq!(s.universe_size(), 8);

        let s = BasisSpec::new(vocab(&["p"]), BasisLevel::One).with_max_premises(1);
        let u: Vec<String> = rule_universe(&s).iter().map(|r| r.to_string()).collect();
        assert_eq!(u, ["fact p.", "rule p => p."]);

        let s = BasisSpec::new(vocab(&["p"]), BasisLevel::Two)
            .with_max_premises(1)
            .with_max_discharge(1);
        assert_eq!(rule_universe(&s).len(), 3);
        assert_eq!(s.universe_size(), 3);
    }

    #[test]
    fn universe_size_matches_enumeration() {
        for level in [BasisLevel::One, BasisLevel::Two] {
            for mp in 0..=2 {
                for md in 0..=2 {
                    for names in [&["p"][..], &["p", "q"], &["p", "q", "r"]] {
                        let s = BasisSpec::new(vocab(names), level)
                            .with_max_premises(mp)
                            .with_max_discharge(md);
                        let u = rule_universe(&s);
                        assert_eq!(u.len() as u128, s.universe_size(), "{s:?}");
                        assert!(u.iter().all(|r| s.admits_rule(r)));
                    }
                }
            }
        }
    }

    #[test]
    fn extensions_of_empty_base() {
        let s = BasisSpec::new(vocab(&["p"]), BasisLevel::One)
            .with_max_premises(1)
            .with_max_rules(Some(2));
        let got: Vec<String> = enumerate_extensions(&s, &Base::new())
            .unwrap()
            .map(|b| b.to_string().replace('\n', " ").trim().to_string())
            .collect();
        assert_eq!(got, ["", "fact p.", "rule p => p.", "fact p. rule p => p."]);
    }

    #[test]
    fn top_of_lattice_has_only_itself() {
        let s = BasisSpec::new(vocab(&["p", "q"]), BasisLevel::One).with_max_rules(Some(8));
        let top: Base = rule_universe(&s).into_iter().collect();
        let ext: Vec<Base> = enumerate_extensions(&s, &top).unwrap().collect();
        assert_eq!(ext, [top]);
    }

    #[test]
    fn extension_count_is_binomial_sum() {
        let s = BasisSpec::new(vocab(&["p", "q"]), BasisLevel::Two)
            .with_max_premises(1)
            .with_max_rules(Some(3));
        let n = rule_universe(&s).len() as u128;
        let expected: u128 = (0..=3).map(|k| binomial(n, k)).sum();
        assert_eq!(enumerate_basis(&s).count() as u128, expected);
        assert_eq!(s.basis_size(), expected);
    }

    #[test]
    fn out_of_basis_base_is_rejected() {
        let s = BasisSpec::new(vocab(&["p"]), BasisLevel::One).with_max_premises(1);
        let b: Base = parse_base("rule [p] p => p.").unwrap();
        assert!(matches!(enumerate_extensions(&s, &b), Err(Error::BaseOutsideBasis(_))));
        let b: Base = parse_base("fact q.").unwrap();
        assert!(matches!(enumerate_extensions(&s, &b), Err(Error::BaseOutsideBasis(_))));
    }

    #[test]
    fn parse_socrates() {
        let b = parse_base("fact h_s. rule h_s => m_s.").unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(render_base(&b), "fact h_s.\nrule h_s => m_s.\n");
    }

    #[test]
    fn parse_parent_base() {
        let text = "rule [fa] old, [mo] old, par => old. rule fa => old. rule mo => old. fact par.";
        let b = parse_base(text).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.level(), Some(RuleLevel::Two));
        assert_eq!(parse_base(&render_base(&b)).unwrap(), b);
    }

    #[test]
    fn parse_with_comments_and_multi_discharge() {
        let b = parse_base("# kb\nrule [p1 p2] q, [r] s, t => c. # trailing\n").unwrap();
        let r = b.iter().next().unwrap();
        assert_eq!(r.premises.len(), 3);
        assert_eq!(render_base(&b), "rule t, [p1 p2] q, [r] s => c.\n");
    }

    #[test]
    fn parse_errors_are_positioned() {
        let Err(Error::Syntax(e)) = parse_base("fact p.\nrule p q => c.") else {
            panic!("expected syntax error");
        };
        assert_eq!((e.line, e.column), (2, 8));
        assert!(parse_base("fact p").is_err());
        assert!(parse_base("axiom p.").is_err());
        assert!(parse_base("rule => c.").is_err());
    }
}
