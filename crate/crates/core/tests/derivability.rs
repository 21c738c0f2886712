mod common;

use std::collections::BTreeSet;

use baselab::{
    brute_closure, derivable_set, derivation_trace, derives, enumerate_basis, Atom, Derivation,
};
use common::{atoms, b, tiny_b1};

fn subsets(vocab: &[Atom]) -> Vec<BTreeSet<Atom>> {
    (0u32..1 << vocab.len())
        .map(|m| vocab.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect()
}

#[test]
fn agrees_with_brute_force_on_three_atoms() {
    let spec = tiny_b1(&["p", "q", "r"]).with_max_premises(1).with_max_rules(Some(3));
    let vocab = atoms(&["p", "q", "r"]);
    for base in enumerate_basis(&spec) {
        for gamma in subsets(&vocab) {
            let brute = brute_closure(&base, &gamma).unwrap();
            for goal in &vocab {
                assert_eq!(derives(&base, &gamma, goal), brute.contains(goal) || gamma.contains(goal));
            }
            let vocab_set: BTreeSet<Atom> = vocab.iter().cloned().collect();
            let mut expected: BTreeSet<Atom> = brute.into_iter().filter(|a| vocab_set.contains(a)).collect();
            expected.extend(gamma.iter().cloned());
            assert_eq!(derivable_set(&base, &gamma, &vocab_set), expected);
        }
    }
}

#[test]
fn worked_examples() {
    let socrates = b("fact h_s. rule h_s => m_s.");
    let m_s = Atom::new("m_s").unwrap();
    assert!(derives(&socrates, &BTreeSet::new(), &m_s));
    assert!(!derives(&b(""), &BTreeSet::new(), &Atom::new("p").unwrap()));

    let parents = b("rule [fa] old, [mo] old, par => old. rule fa => old. rule mo => old. fact par.");
    let old = Atom::new("old").unwrap();
    assert!(derives(&parents, &BTreeSet::new(), &old));
    assert!(brute_closure(&parents, &BTreeSet::new()).unwrap().contains(&old));
    let without_par = b("rule [fa] old, [mo] old, par => old. rule fa => old. rule mo => old.");
    assert!(!derives(&without_par, &BTreeSet::new(), &old));
}

#[test]
fn traces_are_valid_derivations() {
    let base = b("fact a. rule a => b. rule [c] b => d.");
    let d = Atom::new("d").unwrap();
    let trace = derivation_trace(&base, &BTreeSet::new(), &d).unwrap();
    assert_eq!(trace.conclusion(), &d);
    assert!(trace.height() >= 3);
    fn check(t: &Derivation, open: &BTreeSet<Atom>, base: &baselab::Base) {
        match t {
            Derivation::Hypothesis(a) => assert!(open.contains(a)),
            Derivation::Step { rule, premises } => {
                assert!(base.contains(rule));
                assert_eq!(rule.premises.len(), premises.len());
                for (p, (discharged, sub)) in rule.premises.iter().zip(premises) {
                    assert_eq!(&p.discharge, discharged);
                    assert_eq!(sub.conclusion(), &p.head);
                    let inner: BTreeSet<Atom> = open.union(discharged).cloned().collect();
                    check(sub, &inner, base);
                }
            }
        }
    }
    check(&trace, &BTreeSet::new(), &base);
    assert!(derivation_trace(&base, &BTreeSet::new(), &Atom::new("c").unwrap()).is_none());
}
