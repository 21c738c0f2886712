mod common;

use baselab::oracles::{classical_valid, intuitionistic_valid, map_extrinsic};
use common::{f, kripke_valid, CORPUS};

const EXTRA: &[&str] = &[
    "(p -o (q | r)) -o ((p -o q) | (p -o r))",
    "((p | (p -o zero)) -o zero) -o zero",
    "(p -o q) | (q -o p)",
    "((p -o q) -o q) -o (q -o p) -o p",
    "(p -o zero) | ((p -o zero) -o zero)",
    "(p & q -o r) -o p -o q -o r",
];

#[test]
fn corpus_verdicts() {
    for e in CORPUS {
        let m = map_extrinsic(&f(e.text)).unwrap();
        assert_eq!(classical_valid(&m).unwrap(), e.classical, "{}", e.name);
        assert_eq!(intuitionistic_valid(&m), e.intuitionistic, "{}", e.name);
    }
}

#[test]
fn prover_agrees_with_small_kripke_models() {
    for s in CORPUS.iter().map(|e| e.text).chain(EXTRA.iter().copied()) {
        let m = map_extrinsic(&f(s)).unwrap();
        assert_eq!(intuitionistic_valid(&m), kripke_valid(&m, 3), "{s}");
    }
}

#[test]
fn intuitionistic_implies_classical() {
    for s in CORPUS.iter().map(|e| e.text).chain(EXTRA.iter().copied()) {
        let m = map_extrinsic(&f(s)).unwrap();
        assert!(!intuitionistic_valid(&m) || classical_valid(&m).unwrap(), "{s}");
    }
}
