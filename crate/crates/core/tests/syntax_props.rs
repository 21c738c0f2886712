use baselab::{parse_base, parse_formula, render_base, render_formula, Atom, Error, Formula};
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::atom("p")),
        Just(Formula::atom("q")),
        Just(Formula::atom("r1")),
        Just(Formula::atom("_f1")),
        Just(Formula::Bot),
        Just(Formula::Zero),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(5, 40, 2, |inner| {
        (inner.clone(), inner, 0..6usize).prop_map(|(l, r, op)| match op {
            0 => Formula::and(l, r),
            1 => Formula::tensor(l, r),
            2 => Formula::or(l, r),
            3 => Formula::oplus(l, r),
            4 => Formula::implies(l, r),
            _ => Formula::lolli(l, r),
        })
    })
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(f in formula()) {
        let text = render_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn every_string_parses_or_reports_a_position(s in "[pq()&|*+!ie -o>bt_z0-9]{0,24}") {
        match parse_formula(&s) {
            Ok(f) => prop_assert_eq!(parse_formula(&render_formula(&f)).unwrap(), f),
            Err(Error::Syntax(e)) => {
                prop_assert!(e.pos <= s.len());
                prop_assert!(!e.expected.is_empty());
            }
            Err(other) => prop_assert!(matches!(other, Error::InvalidAtom(_)), "{other:?}"),
        }
    }
}

#[test]
fn base_files_round_trip() {
    let text = "# socrates\nfact h_s.\nrule h_s => m_s.\nrule [fa] old, [mo] old, par => old.\n";
    let b = parse_base(text).unwrap();
    assert_eq!(parse_base(&render_base(&b)).unwrap(), b);
    assert_eq!(b.len(), 3);
}

#[test]
fn atoms_are_validated() {
    assert!(Atom::new("h_s").is_ok());
    for bad in ["", "P", "1p", "bot", "zero", "_", "p-q"] {
        assert!(Atom::new(bad).is_err(), "{bad}");
    }
}
