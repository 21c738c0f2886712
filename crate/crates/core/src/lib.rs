//! Base-extension semantics over finite atomic systems.
//!
//! A [`Base`] is a set of atomic rules. Derivability ([`derives`]) composes a
//! base's rules with discharge. Support ([`SupportContext::supports`])
//! interprets formulas clause by clause relative to a base and, for the
//! extrinsic connectives, its extensions within a finite [`BasisSpec`].
//! [`oracles`] provides independent classical and intuitionistic checkers to
//! compare validity against.

pub mod atomic;
pub mod derivability;
pub mod error;
mod lattice;
pub mod oracles;
pub mod support;
pub mod syntax;
pub mod translate;

pub use atomic::{
    enumerate_basis, enumerate_extensions, parse_base, render_base, rule_universe, AtomicRule, Base,
    BasisLevel, BasisSpec, RuleLevel, RulePremise,
};
pub use derivability::{brute_closure, derivable_set, derivation_trace, derives, Derivation};
pub use error::{Error, Result, SyntaxError};
pub use oracles::{
    classical_valid, compare, intuitionistic_valid, map_extrinsic, Comparison, OracleKind,
    StandardFormula,
};
pub use support::{MonotonicityReport, Refutation, Stats, Strategy, SupportContext, SupportTable};
pub use syntax::{atoms_of, fragment_of, parse_formula, render_formula, Atom, Formula, FragmentTag};
pub use translate::{base_to_formula, formula_to_base, is_clausal, rule_to_formula};
