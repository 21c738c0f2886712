mod common;

use std::collections::HashSet;

use baselab::{
    base_to_formula, enumerate_basis, formula_to_base, fragment_of, is_clausal, rule_to_formula,
    rule_universe, Base, Error, FragmentTag,
};
use common::{f, tiny_b1, tiny_b2};

#[test]
fn rule_images_invert_and_are_injective() {
    for spec in [tiny_b1(&["p", "q"]), tiny_b2(&["p", "q"]), tiny_b2(&["p", "q"]).with_max_premises(2)] {
        let universe = rule_universe(&spec);
        let mut seen = HashSet::new();
        for r in &universe {
            let image = rule_to_formula(r);
            assert!(seen.insert(image.clone()), "{image} repeated");
            assert!(is_clausal(&image));
            assert_eq!(fragment_of(&image), FragmentTag::Clausal);
            assert_eq!(formula_to_base(&image).unwrap(), Base::from_iter([r.clone()]));
        }
    }
}

#[test]
fn base_images_invert() {
    for x in enumerate_basis(&tiny_b1(&["p", "q"])).skip(1) {
        assert_eq!(formula_to_base(&base_to_formula(&x).unwrap()).unwrap(), x);
    }
    assert_eq!(base_to_formula(&Base::new()), Err(Error::EmptyBase));
}

#[test]
fn non_clausal_formulas_are_rejected() {
    for s in ["p -o q", "p | q", "bot", "((p -> q) -> r) -> s", "p -> (q -> r)"] {
        assert!(matches!(formula_to_base(&f(s)), Err(Error::FormulaNotClausal(_))), "{s}");
    }
}
