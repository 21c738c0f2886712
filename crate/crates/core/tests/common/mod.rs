#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use baselab::oracles::StandardFormula;
use baselab::{
    derives, enumerate_extensions, formula_to_base, parse_base, parse_formula, Atom, Base,
    BasisLevel, BasisSpec, Formula,
};

pub fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn b(s: &str) -> Base {
    parse_base(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn atoms(names: &[&str]) -> Vec<Atom> {
    names.iter().map(|n| Atom::new(*n).unwrap()).collect()
}

/// Extrinsic formulas over at most two atoms, with their expected status.
pub struct CorpusEntry {
    pub name: &'static str,
    pub text: &'static str,
    pub classical: bool,
    pub intuitionistic: bool,
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry { name: "peirce", text: "((p -o q) -o p) -o p", classical: true, intuitionistic: false },
    CorpusEntry { name: "double negation elimination", text: "((p -o zero) -o zero) -o p", classical: true, intuitionistic: false },
    CorpusEntry { name: "identity", text: "p -o p", classical: true, intuitionistic: true },
    CorpusEntry { name: "p -o q", text: "p -o q", classical: false, intuitionistic: false },
    CorpusEntry { name: "excluded middle", text: "p + (p -o zero)", classical: true, intuitionistic: false },
    CorpusEntry { name: "ex falso", text: "zero -o p", classical: true, intuitionistic: true },
    CorpusEntry { name: "tensor commutativity", text: "p * q -o q * p", classical: true, intuitionistic: true },
    CorpusEntry { name: "oplus commutativity", text: "p + q -o q + p", classical: true, intuitionistic: true },
    CorpusEntry { name: "tensor associativity", text: "(p * q) * p -o p * (q * p)", classical: true, intuitionistic: true },
    CorpusEntry { name: "oplus associativity", text: "(p + q) + p -o p + (q + p)", classical: true, intuitionistic: true },
];

/// Formulas over `{p, q}` mixing every connective, for law checks.
pub const MIXED: &[&str] = &[
    "p", "q", "bot", "zero", "p & q", "p * q", "p | q", "p + q", "p -o q", "q -o p",
    "p -> q", "(p -> q) -> q", "p -> p & q", "p + (p -o zero)", "(p -o q) -o p",
    "p -o bot", "p -o zero", "(p -o zero) -o zero", "p * (q + p)", "(p | q) -o q",
    "p -> zero", "(q -> p) -> q -> p",
];

/// Unbounded bases of level 1 over `vocab` with up to two premises.
pub fn tiny_b1(vocab: &[&str]) -> BasisSpec {
    BasisSpec::new(atoms(vocab), BasisLevel::One).with_max_rules(None)
}

/// Unbounded bases of level 2 over `vocab`, one premise discharging one atom.
pub fn tiny_b2(vocab: &[&str]) -> BasisSpec {
    BasisSpec::new(atoms(vocab), BasisLevel::Two)
        .with_max_premises(1)
        .with_max_discharge(1)
        .with_max_rules(None)
}

/// Support read straight off the clauses, enumerating extensions with
/// `enumerate_extensions` and deciding atoms with `derives`.
pub struct NaiveSupport {
    pub spec: BasisSpec,
    memo: HashMap<(Base, Formula), bool>,
}

impl NaiveSupport {
    pub fn new(spec: BasisSpec) -> Self {
        NaiveSupport { spec, memo: HashMap::new() }
    }

    fn extensions(&self, b: &Base) -> Vec<Base> {
        enumerate_extensions(&self.spec, b).unwrap().collect()
    }

    fn derives_at(&self, b: &Base, p: &Atom) -> bool {
        derives(b, &BTreeSet::new(), p)
    }

    /// `hyps ⊩_c P` for an atom `P`.
    fn conditional(&mut self, c: &Base, hyps: &[&Formula], p: &Atom) -> bool {
        self.extensions(c)
            .iter()
            .all(|d| !hyps.iter().all(|h| self.supports(d, h)) || self.derives_at(d, p))
    }

    pub fn supports(&mut self, b: &Base, f: &Formula) -> bool {
        let key = (b.clone(), f.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let vocab: Vec<Atom> = self.spec.vocab.iter().cloned().collect();
        let v = match f {
            Formula::Atom(p) => self.derives_at(b, p),
            Formula::Bot => false,
            Formula::Zero => vocab.iter().all(|p| self.derives_at(b, p)),
            Formula::And(l, r) => self.supports(b, l) && self.supports(b, r),
            Formula::Or(l, r) => self.supports(b, l) || self.supports(b, r),
            Formula::Implies(l, r) => {
                let augmented = b.union(&formula_to_base(l).unwrap());
                assert!(self.spec.admits_base(&augmented), "augmentation leaves the basis");
                self.supports(&augmented, r)
            }
            Formula::Lolli(l, r) => self
                .extensions(b)
                .iter()
                .all(|c| !self.supports(c, l) || self.supports(c, r)),
            Formula::Tensor(l, r) => self.extensions(b).iter().all(|c| {
                vocab
                    .iter()
                    .all(|p| !self.conditional(c, &[l, r], p) || self.derives_at(c, p))
            }),
            Formula::Oplus(l, r) => self.extensions(b).iter().all(|c| {
                vocab.iter().all(|p| {
                    !(self.conditional(c, &[l], p) && self.conditional(c, &[r], p))
                        || self.derives_at(c, p)
                })
            }),
        };
        self.memo.insert(key, v);
        v
    }
}

/// Intuitionistic validity by exhaustive search over Kripke models whose
/// frames are partial orders on at most `max_worlds` worlds.
pub fn kripke_valid(f: &StandardFormula, max_worlds: usize) -> bool {
    let atoms: Vec<Atom> = f.atoms().into_iter().collect();
    (1..=max_worlds).all(|n| {
        partial_orders(n).iter().all(|le| {
            let upsets: Vec<u32> = (0u32..1 << n).filter(|&s| is_upset(le, n, s)).collect();
            let mut choice = vec![0usize; atoms.len()];
            loop {
                let val: HashMap<&Atom, u32> =
                    atoms.iter().zip(&choice).map(|(a, &i)| (a, upsets[i])).collect();
                if (0..n).any(|w| !forces(le, n, &val, w, f)) {
                    return false;
                }
                // next valuation
                let mut k = 0;
                loop {
                    if k == choice.len() {
                        return true;
                    }
                    choice[k] += 1;
                    if choice[k] < upsets.len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
            }
        })
    })
}

/// `le[w][v]` iff `w ≤ v`.
fn partial_orders(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            le[i][j] = mask >> k & 1 == 1;
        }
        let antisymmetric = (0..n).all(|i| (0..n).all(|j| i == j || !(le[i][j] && le[j][i])));
        let transitive = (0..n)
            .all(|i| (0..n).all(|j| (0..n).all(|k| !(le[i][j] && le[j][k]) || le[i][k])));
        if antisymmetric && transitive {
            out.push(le);
        }
    }
    out
}

fn is_upset(le: &[Vec<bool>], n: usize, s: u32) -> bool {
    (0..n).all(|w| s >> w & 1 == 0 || (0..n).all(|v| !le[w][v] || s >> v & 1 == 1))
}

fn forces(le: &[Vec<bool>], n: usize, val: &HashMap<&Atom, u32>, w: usize, f: &StandardFormula) -> bool {
    use StandardFormula as S;
    match f {
        S::Atom(a) => val[a] >> w & 1 == 1,
        S::Falsum => false,
        S::And(a, b) => forces(le, n, val, w, a) && forces(le, n, val, w, b),
        S::Or(a, b) => forces(le, n, val, w, a) || forces(le, n, val, w, b),
        S::Implies(a, b) => (0..n)
            .filter(|&v| le[w][v])
            .all(|v| !forces(le, n, val, v, a) || forces(le, n, val, v, b)),
    }
}
