//! The support relation `⊩_B φ` over a finite basis.
//!
//! | formula | supported at `B` iff |
//! |---------|-----------------------|
//! | `P`     | `⊢_B P` |
//! | `φ → ψ` | `ψ` is supported at `B ∪ ⦅φ⦆` |
//! | `φ ⊸ ψ` | every `C ⊇ B` supporting `φ` supports `ψ` |
//! | `φ ∧ ψ` | both are supported at `B` |
//! | `φ ⊗ ψ` | for all `C ⊇ B` and atoms `P`: if `φ, ψ ⊩_C P` then `⊢_C P` |
//! | `⊥`     | never |
//! | `0`     | every atom is derivable in `B` |
//! | `φ ∨ ψ` | one of them is supported at `B` |
//! | `φ ⊕ ψ` | for all `C ⊇ B` and atoms `P`: if `φ ⊩_C P` and `ψ ⊩_C P` then `⊢_C P` |
//!
//! with `Δ ⊩_B φ` meaning every `C ⊇ B` supporting all of `Δ` supports `φ`.
//! Quantifiers over extensions range over the bases of the context's
//! [`BasisSpec`]; quantifiers over atoms range over its vocabulary.
//!
//! Two evaluation strategies are provided. [`Strategy::Recursive`] walks the
//! clauses top-down with short-circuiting and memoization.
//! [`Strategy::LatticeDp`] computes, for each subformula, its value at every
//! base of the lattice at once, sweeping from the largest bases down so that
//! "for every extension" clauses read already-final superset bits.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::atomic::{rule_universe, AtomicRule, Base, BasisSpec};
use crate::derivability::{closure_at_empty, AtomIndex, CompiledRule, Mask};
use crate::error::{Error, Result};
use crate::lattice::{lattice_size, Bits, Lattice, Pos};
use crate::syntax::{Atom, Formula};
use crate::translate::formula_to_base;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Recursive,
    #[default]
    LatticeDp,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(Strategy::Recursive),
            "lattice" | "lattice_dp" | "auto" => Ok(Strategy::LatticeDp),
            _ => Err(Error::InvalidConfig(format!("unknown strategy `{s}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Recursive => "recursive",
            Strategy::LatticeDp => "lattice",
        })
    }
}

/// Default cap on the number of bases a single lattice may hold.
pub const DEFAULT_MAX_ENUM: u128 = 1 << 24;

/// Lattices at most this large are shared across queries by rooting them at
/// the empty base.
const SHARED_LATTICE_LIMIT: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub bases_enumerated: u64,
    pub cache_hits: u64,
}

#[derive(Default)]
struct Counters {
    bases: AtomicU64,
    hits: AtomicU64,
}

/// One lattice plus its per-base derivability table and cached subformula tables.
struct View {
    lattice: Lattice,
    /// Atoms derivable from no assumptions, per base.
    closure: Vec<Mask>,
    tables: Mutex<HashMap<Formula, Arc<Bits>>>,
}

/// All semantic judgments are relative to one context: a basis, an
/// evaluation strategy and the caches built while answering queries.
pub struct SupportContext {
    spec: BasisSpec,
    strategy: Strategy,
    paranoid: bool,
    max_enum: u128,
    index: AtomIndex,
    universe: Arc<Vec<AtomicRule>>,
    compiled: Vec<CompiledRule>,
    views: Mutex<HashMap<Vec<Pos>, Arc<View>>>,
    counters: Counters,
}

impl fmt::Debug for SupportContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportContext")
            .field("spec", &self.spec)
            .field("strategy", &self.strategy)
            .field("paranoid", &self.paranoid)
            .finish_non_exhaustive()
    }
}

impl SupportContext {
    pub fn new(spec: BasisSpec) -> Result<Self> {
        Self::with_options(spec, Strategy::default(), DEFAULT_MAX_ENUM)
    }

    pub fn with_options(spec: BasisSpec, strategy: Strategy, max_enum: u128) -> Result<Self> {
        if let Some(0) = spec.max_rules {
            return Err(Error::InvalidConfig("max_rules must be at least 1".into()));
        }
        if spec.vocab.len() > crate::derivability::MAX_ATOMS {
            return Err(Error::InvalidConfig(format!(
                "vocabulary of {} atoms is too large",
                spec.vocab.len()
            )));
        }
        let size = spec.universe_size();
        if size > max_enum {
            return Err(Error::EnumerationCapExceeded {
                requested: size,
                cap: max_enum,
            });
        }
        let index = AtomIndex::new(&spec.vocab);
        let universe = Arc::new(rule_universe(&spec));
        let compiled = universe.iter().map(|r| index.compile(r)).collect();
        Ok(SupportContext {
            spec,
            strategy,
            paranoid: false,
            max_enum,
            index,
            universe,
            compiled,
            views: Mutex::new(HashMap::new()),
            counters: Counters::default(),
        })
    }

    /// A context whose vocabulary is the atoms of `formulas` and `bases`
    /// plus `fresh` reserved fresh atoms. The vocabulary of `template` is
    /// replaced; its bounds are kept.
    pub fn covering(
        template: &BasisSpec,
        formulas: &[&Formula],
        bases: &[&Base],
        fresh: usize,
        strategy: Strategy,
        max_enum: u128,
    ) -> Result<Self> {
        let mut spec = template.clone();
        spec.vocab = formulas
            .iter()
            .flat_map(|f| f.atoms())
            .chain(bases.iter().flat_map(|b| b.atoms()))
            .collect();
        Self::with_options(spec.with_fresh(fresh), strategy, max_enum)
    }

    /// Evaluate validity at every base instead of only the empty one.
    pub fn set_paranoid(&mut self, paranoid: bool) {
        self.paranoid = paranoid;
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn universe(&self) -> &[AtomicRule] {
        &self.universe
    }

    pub fn stats(&self) -> Stats {
        Stats {
            bases_enumerated: self.counters.bases.load(Ordering::Relaxed),
            cache_hits: self.counters.hits.load(Ordering::Relaxed),
        }
    }

    /// `⊩_b f`.
    pub fn supports(&self, b: &Base, f: &Formula) -> Result<bool> {
        let (view, x) = self.locate(b)?;
        let program = self.compile(&view, f)?;
        program.check_reach(&view.lattice, Reach::Single(x.clone()))?;
        self.evaluate_at(&view, &program, f, &x)
    }

    /// `delta ⊩_b f`. With an empty `delta` this is support of `f` at every
    /// extension of `b`.
    pub fn entails(&self, b: &Base, delta: &[Formula], f: &Formula) -> Result<bool> {
        match delta.iter().cloned().reduce(Formula::and) {
            Some(hyps) => self.supports(b, &Formula::lolli(hyps, f.clone())),
            None => Ok(self.support_table(b, f)?.all()),
        }
    }

    /// Support at every base of the basis.
    ///
    /// Support is monotone under extension, so this is support at the empty
    /// base. Under the lattice strategy the monotonicity of the computed table
    /// is audited first, falling back to checking every base; paranoid mode
    /// always checks every base.
    pub fn valid(&self, f: &Formula) -> Result<bool> {
        let empty = Base::new();
        if self.paranoid {
            return Ok(self.support_table(&empty, f)?.all());
        }
        match self.strategy {
            Strategy::Recursive => self.supports(&empty, f),
            Strategy::LatticeDp => {
                let (view, x) = self.locate(&empty)?;
                let program = self.compile(&view, f)?;
                program.check_reach(&view.lattice, Reach::Single(x))?;
                let table = self.dp_table(&view, &program, f);
                let audited = view.lattice.all_extensions(&table);
                if audited == *table {
                    Ok(table.get(0))
                } else {
                    Ok(table.all())
                }
            }
        }
    }

    /// A base of the basis at which `f` is not supported, with the fewest
    /// rules, first in enumeration order. `None` if `f` is valid.
    pub fn countermodel(&self, f: &Formula) -> Result<Option<Base>> {
        if self.valid(f)? {
            return Ok(None);
        }
        let table = self.support_table(&Base::new(), f)?;
        Ok(table.first_unsupported().map(|i| table.base(i)))
    }

    /// Values of `f` at every base extending `root`, in enumeration order.
    pub fn support_table(&self, root: &Base, f: &Formula) -> Result<SupportTable> {
        let (view, x) = self.locate(root)?;
        let program = self.compile(&view, f)?;
        program.check_reach(&view.lattice, Reach::Up(x.clone()))?;
        let bits = match self.strategy {
            Strategy::LatticeDp => self.dp_table(&view, &program, f),
            Strategy::Recursive => {
                let mut rec = Recursive::new(&view, &program, &self.index, &self.counters);
                let mut values = Vec::new();
                view.lattice.for_each_extension(&x, |i, y| {
                    values.push((i, rec.eval(program.root, i, y)));
                    true
                });
                let mut bits = Bits::zeros(view.lattice.len());
                for (i, v) in values {
                    bits.set(i, v);
                }
                Arc::new(bits)
            }
        };
        let indices: Vec<usize> = if x.is_empty() {
            (0..view.lattice.len()).collect()
        } else {
            let mut v = Vec::new();
            view.lattice.for_each_extension(&x, |i, _| {
                v.push(i);
                true
            });
            v.sort_unstable();
            v
        };
        Ok(SupportTable { view, bits, indices })
    }

    /// All pairs `b ⊆ c` (one-rule extensions) and formulas with
    /// `⊩_b f` but not `⊩_c f`. Violations along longer chains always show
    /// up on some one-rule step.
    pub fn check_monotonicity(&self, formulas: &[Formula]) -> Result<MonotonicityReport> {
        let mut report = MonotonicityReport::default();
        for f in formulas {
            let table = self.support_table(&Base::new(), f)?;
            let lat = &table.view.lattice;
            let bits = &table.bits;
            let pairs: Vec<(usize, Vec<usize>, usize)> = lat
                .map_all(|i, x| {
                    let mut bad = Vec::new();
                    let mut n = 0;
                    lat.for_each_child(x, |j| {
                        n += 1;
                        if bits.get(i) && !bits.get(j) {
                            bad.push(j);
                        }
                        true
                    });
                    (i, bad, n)
                });
            for (i, bad, n) in pairs {
                report.pairs_checked += n as u64;
                for j in bad {
                    report.violations.push(MonotonicityViolation {
                        smaller: lat.base_at(i),
                        larger: lat.base_at(j),
                        formula: f.clone(),
                    });
                }
            }
        }
        Ok(report)
    }

    /// Why `f` fails at `b`: the extension (and atom, for atom-quantified
    /// clauses) that refutes the outermost clause. `None` if `f` holds at `b`.
    pub fn explain_failure(&self, b: &Base, f: &Formula) -> Result<Option<Refutation>> {
        if self.supports(b, f)? {
            return Ok(None);
        }
        let atoms: Vec<Atom> = self.spec.vocab.iter().cloned().collect();
        let failing_extension = |pred: &dyn Fn(&Base) -> Result<bool>| -> Result<Option<Base>> {
            let table = self.support_table(b, &Formula::Bot)?;
            for k in 0..table.len() {
                let c = table.base(k);
                if !pred(&c)? {
                    return Ok(Some(c));
                }
            }
            Ok(None)
        };
        let derives = |c: &Base, p: &Atom| self.supports(c, &Formula::Atom(p.clone()));
        let refutation = match f {
            Formula::Lolli(phi, psi) => failing_extension(&|c| {
                Ok(!self.supports(c, phi)? || self.supports(c, psi)?)
            })?
            .map(|c| Refutation {
                clause: "lolli",
                extension: c,
                atom: None,
            }),
            Formula::Tensor(phi, psi) | Formula::Oplus(phi, psi) => {
                let tensor = matches!(f, Formula::Tensor(..));
                let mut found = None;
                for p in &atoms {
                    let goal = Formula::Atom(p.clone());
                    let hyp_holds = |c: &Base| -> Result<bool> {
                        if tensor {
                            self.entails(c, &[(**phi).clone(), (**psi).clone()], &goal)
                        } else {
                            Ok(self.entails(c, &[(**phi).clone()], &goal)?
                                && self.entails(c, &[(**psi).clone()], &goal)?)
                        }
                    };
                    if let Some(c) = failing_extension(&|c| Ok(!hyp_holds(c)? || derives(c, p)?))? {
                        found = Some(Refutation {
                            clause: if tensor { "tensor" } else { "oplus" },
                            extension: c,
                            atom: Some(p.clone()),
                        });
                        break;
                    }
                }
                found
            }
            Formula::Zero => atoms
                .iter()
                .find(|p| !derives(b, p).unwrap_or(false))
                .map(|p| Refutation {
                    clause: "zero",
                    extension: b.clone(),
                    atom: Some(p.clone()),
                }),
            _ => None,
        };
        Ok(refutation)
    }

    /// The view holding `b`, and `b`'s free positions in it.
    fn locate(&self, b: &Base) -> Result<(Arc<View>, Vec<Pos>)> {
        self.spec.check_base(b)?;
        let mut idx: Vec<Pos> = b
            .iter()
            .map(|r| {
                self.universe
                    .binary_search(r)
                    .map(|i| i as Pos)
                    .map_err(|_| Error::BaseOutsideBasis(format!("rule `{r}` is outside the rule universe")))
            })
            .collect::<Result<_>>()?;
        idx.sort_unstable();

        let full = lattice_size(self.universe.len(), self.spec.max_rules.unwrap_or(self.universe.len()));
        let root: Vec<Pos> = if full <= SHARED_LATTICE_LIMIT.min(self.max_enum) {
            Vec::new()
        } else {
            idx.clone()
        };
        let view = self.view(root)?;
        let x: Vec<Pos> = idx
            .iter()
            .filter_map(|&u| view.lattice.free_position(u))
            .collect();
        Ok((view, x))
    }

    fn view(&self, root: Vec<Pos>) -> Result<Arc<View>> {
        if let Some(v) = self.views.lock().expect("views lock").get(&root) {
            self.counters.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v.clone());
        }
        let free = self.universe.len() - root.len();
        let depth = self
            .spec
            .max_rules
            .map_or(free, |m| m.saturating_sub(root.len()).min(free));
        let size = lattice_size(free, depth);
        if size > self.max_enum {
            return Err(Error::EnumerationCapExceeded {
                requested: size,
                cap: self.max_enum,
            });
        }
        let lattice = Lattice::new(self.universe.clone(), root.clone(), self.spec.max_rules);
        let closure = lattice.map_all(|_, x| {
            let rules: Vec<CompiledRule> = lattice
                .rule_indices(x)
                .map(|u| self.compiled[u as usize].clone())
                .collect();
            closure_at_empty(&rules)
        });
        self.counters
            .bases
            .fetch_add(lattice.len() as u64, Ordering::Relaxed);
        let view = Arc::new(View {
            lattice,
            closure,
            tables: Mutex::new(HashMap::new()),
        });
        self.views
            .lock()
            .expect("views lock")
            .insert(root, view.clone());
        Ok(view)
    }

    fn compile(&self, view: &View, f: &Formula) -> Result<Program> {
        let mut p = Program {
            nodes: Vec::new(),
            formulas: Vec::new(),
            ids: HashMap::new(),
            root: 0,
        };
        p.root = p.add(self, view, f)?;
        Ok(p)
    }

    fn evaluate_at(&self, view: &View, program: &Program, f: &Formula, x: &[Pos]) -> Result<bool> {
        Ok(match self.strategy {
            Strategy::LatticeDp => {
                let i = view.lattice.rank(x);
                self.dp_table(view, program, f).get(i)
            }
            Strategy::Recursive => {
                let i = view.lattice.rank(x);
                Recursive::new(view, program, &self.index, &self.counters).eval(program.root, i, x)
            }
        })
    }

    fn dp_table(&self, view: &View, program: &Program, f: &Formula) -> Arc<Bits> {
        if let Some(t) = view.tables.lock().expect("tables lock").get(f) {
            self.counters.hits.fetch_add(1, Ordering::Relaxed);
            return t.clone();
        }
        let lat = &view.lattice;
        let len = lat.len();
        let atom_bits = |bit: Mask| Bits::from_fn(len, |i| view.closure[i] & bit != 0);
        let vocab_bits: Vec<Bits> = (0..self.index.len()).map(|k| atom_bits(1 << k)).collect();
        let mut tables: Vec<Arc<Bits>> = Vec::with_capacity(program.nodes.len());
        for (id, node) in program.nodes.iter().enumerate() {
            let cached = view
                .tables
                .lock()
                .expect("tables lock")
                .get(&program.formulas[id])
                .cloned();
            if let Some(t) = cached {
                self.counters.hits.fetch_add(1, Ordering::Relaxed);
                tables.push(t);
                continue;
            }
            let t = |i: usize| &*tables[i];
            let bits = match *node {
                Node::Atom(bit) => atom_bits(bit),
                Node::Bot => Bits::zeros(len),
                Node::Zero => {
                    let full = self.index.full();
                    Bits::from_fn(len, |i| view.closure[i] == full)
                }
                Node::And(a, b) => t(a).and(t(b)),
                Node::Or(a, b) => t(a).or(t(b)),
                Node::Lolli(a, b) => lat.all_extensions(&t(a).implies(t(b))),
                Node::Tensor(a, b) => {
                    let both = t(a).and(t(b));
                    let mut g = Bits::ones(len);
                    for p in &vocab_bits {
                        let hyp = lat.all_extensions(&both.implies(p));
                        g = g.and(&hyp.implies(p));
                    }
                    lat.all_extensions(&g)
                }
                Node::Oplus(a, b) => {
                    let mut g = Bits::ones(len);
                    for p in &vocab_bits {
                        let left = lat.all_extensions(&t(a).implies(p));
                        let right = lat.all_extensions(&t(b).implies(p));
                        g = g.and(&left.and(&right).implies(p));
                    }
                    lat.all_extensions(&g)
                }
                Node::Implies { ref rules, body } => {
                    let body = t(body);
                    let values = lat.map_all(|_, x| lat.augment(x, rules).is_some_and(|j| body.get(j)));
                    Bits::from_bools(&values)
                }
            };
            let bits = Arc::new(bits);
            view.tables
                .lock()
                .expect("tables lock")
                .insert(program.formulas[id].clone(), bits.clone());
            tables.push(bits);
        }
        tables[program.root].clone()
    }
}

/// Values of one formula over the bases extending a root base.
pub struct SupportTable {
    view: Arc<View>,
    bits: Arc<Bits>,
    /// Lattice indices of the bases extending the root, ascending.
    indices: Vec<usize>,
}

impl SupportTable {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The value at the `k`th base in enumeration order.
    pub fn value(&self, k: usize) -> bool {
        self.bits.get(self.indices[k])
    }

    pub fn base(&self, k: usize) -> Base {
        self.view.lattice.base_at(self.indices[k])
    }

    pub fn values(&self) -> impl Iterator<Item = bool> + '_ {
        self.indices.iter().map(|&i| self.bits.get(i))
    }

    pub fn all(&self) -> bool {
        if self.indices.len() == self.view.lattice.len() {
            self.bits.all()
        } else {
            self.values().all(|v| v)
        }
    }

    pub fn count_supported(&self) -> usize {
        self.values().filter(|&v| v).count()
    }

    pub fn first_unsupported(&self) -> Option<usize> {
        if self.indices.len() == self.view.lattice.len() {
            self.bits.first_zero()
        } else {
            self.values().position(|v| !v)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub smaller: Base,
    pub larger: Base,
    pub formula: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub pairs_checked: u64,
    pub violations: Vec<MonotonicityViolation>,
}

impl MonotonicityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The extension (and atom) refuting the outermost clause of a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub clause: &'static str,
    pub extension: Base,
    pub atom: Option<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Atom(Mask),
    Bot,
    Zero,
    And(usize, usize),
    Or(usize, usize),
    Tensor(usize, usize),
    Oplus(usize, usize),
    Lolli(usize, usize),
    /// `⦅φ⦆ → body`, with `⦅φ⦆` given as free positions of the view.
    Implies { rules: Vec<Pos>, body: usize },
}

/// A formula compiled against one view: a hash-consed DAG in post-order.
struct Program {
    nodes: Vec<Node>,
    formulas: Vec<Formula>,
    ids: HashMap<Formula, usize>,
    root: usize,
}

#[derive(Clone, Debug)]
enum Reach {
    /// Evaluated at exactly this base.
    Single(Vec<Pos>),
    /// Evaluated at every extension of this base.
    Up(Vec<Pos>),
}

impl Program {
    fn add(&mut self, ctx: &SupportContext, view: &View, f: &Formula) -> Result<usize> {
        if let Some(&id) = self.ids.get(f) {
            return Ok(id);
        }
        let node = match f {
            Formula::Atom(a) => Node::Atom(
                ctx.index
                    .bit(a)
                    .ok_or_else(|| Error::AtomOutsideVocabulary(a.to_string()))?,
            ),
            Formula::Bot => Node::Bot,
            Formula::Zero => Node::Zero,
            Formula::And(l, r) => Node::And(self.add(ctx, view, l)?, self.add(ctx, view, r)?),
            Formula::Or(l, r) => Node::Or(self.add(ctx, view, l)?, self.add(ctx, view, r)?),
            Formula::Tensor(l, r) => Node::Tensor(self.add(ctx, view, l)?, self.add(ctx, view, r)?),
            Formula::Oplus(l, r) => Node::Oplus(self.add(ctx, view, l)?, self.add(ctx, view, r)?),
            Formula::Lolli(l, r) => Node::Lolli(self.add(ctx, view, l)?, self.add(ctx, view, r)?),
            Formula::Implies(l, r) => {
                let program = formula_to_base(l)?;
                let mut rules = Vec::new();
                for rule in program.iter() {
                    if let Some(a) = rule.atoms().into_iter().find(|a| ctx.index.bit(a).is_none()) {
                        return Err(Error::AtomOutsideVocabulary(a.to_string()));
                    }
                    let u = ctx.universe.binary_search(rule).map_err(|_| {
                        Error::AugmentedBaseOutsideBasis(format!(
                            "rule `{rule}` from antecedent `{l}` is outside the rule universe"
                        ))
                    })?;
                    // rules already in the view's root need no augmentation
                    if let Some(p) = view.lattice.free_position(u as Pos) {
                        rules.push(p);
                    }
                }
                rules.sort_unstable();
                let body = self.add(ctx, view, r)?;
                Node::Implies { rules, body }
            }
        };
        let id = self.nodes.len();
        self.nodes.push(node);
        self.formulas.push(f.clone());
        self.ids.insert(f.clone(), id);
        Ok(id)
    }

    /// Fails if some `→` node would be evaluated at a base whose augmentation
    /// leaves the basis.
    fn check_reach(&self, lat: &Lattice, reach: Reach) -> Result<()> {
        self.check_node(lat, self.root, reach)
    }

    fn check_node(&self, lat: &Lattice, id: usize, reach: Reach) -> Result<()> {
        match &self.nodes[id] {
            Node::Atom(_) | Node::Bot | Node::Zero => Ok(()),
            Node::And(a, b) | Node::Or(a, b) => {
                self.check_node(lat, *a, reach.clone())?;
                self.check_node(lat, *b, reach)
            }
            Node::Tensor(a, b) | Node::Oplus(a, b) | Node::Lolli(a, b) => {
                let up = match reach {
                    Reach::Single(s) | Reach::Up(s) => Reach::Up(s),
                };
                self.check_node(lat, *a, up.clone())?;
                self.check_node(lat, *b, up)
            }
            Node::Implies { rules, body } => {
                let (s, upward) = match &reach {
                    Reach::Single(s) => (s, false),
                    Reach::Up(s) => (s, true),
                };
                let mut joined: Vec<Pos> = s.iter().chain(rules).copied().collect();
                joined.sort_unstable();
                joined.dedup();
                // the largest augmented base reachable from the evaluation set
                let worst = if upward {
                    let padding = (lat.depth() - s.len()).min(lat.free_len() - joined.len());
                    joined.len() + padding
                } else {
                    joined.len()
                };
                if worst > lat.depth() {
                    let rendered: Vec<String> = rules
                        .iter()
                        .map(|&p| lat.universe()[lat.universe_index(p) as usize].to_string())
                        .collect();
                    return Err(Error::AugmentedBaseOutsideBasis(format!(
                        "adding [{}] to a base of the basis can exceed max_rules",
                        rendered.join(" ")
                    )));
                }
                let next = if upward {
                    Reach::Up(joined)
                } else {
                    Reach::Single(joined)
                };
                self.check_node(lat, *body, next)
            }
        }
    }
}

/// Top-down evaluation with short-circuiting; results memoized per
/// `(node, base)` and per `(node, atom, base)` for atom-conditional support.
struct Recursive<'a> {
    lat: &'a Lattice,
    closure: &'a [Mask],
    program: &'a Program,
    atom_bits: Vec<Mask>,
    memo: Vec<HashMap<usize, bool>>,
    cond_memo: HashMap<(usize, usize, usize, usize), bool>,
    counters: &'a Counters,
}

impl<'a> Recursive<'a> {
    fn new(view: &'a View, program: &'a Program, index: &AtomIndex, counters: &'a Counters) -> Self {
        Recursive {
            lat: &view.lattice,
            closure: &view.closure,
            program,
            atom_bits: (0..index.len()).map(|k| 1 << k).collect(),
            memo: vec![HashMap::new(); program.nodes.len()],
            cond_memo: HashMap::new(),
            counters,
        }
    }

    fn every_extension(&mut self, x: &[Pos], mut f: impl FnMut(&mut Self, usize, &[Pos]) -> bool) -> bool {
        let lat = self.lat;
        let mut visited = 0u64;
        let ok = lat.for_each_extension(x, |j, y| {
            visited += 1;
            f(self, j, y)
        });
        self.counters.bases.fetch_add(visited, Ordering::Relaxed);
        ok
    }

    fn derives(&self, i: usize, bit: Mask) -> bool {
        self.closure[i] & bit != 0
    }

    fn eval(&mut self, id: usize, i: usize, x: &[Pos]) -> bool {
        if let Some(&v) = self.memo[id].get(&i) {
            return v;
        }
        let v = match self.program.nodes[id] {
            Node::Atom(bit) => self.derives(i, bit),
            Node::Bot => false,
            Node::Zero => self.atom_bits.iter().all(|&b| self.closure[i] & b != 0),
            Node::And(a, b) => self.eval(a, i, x) && self.eval(b, i, x),
            Node::Or(a, b) => self.eval(a, i, x) || self.eval(b, i, x),
            Node::Lolli(a, b) => {
                self.every_extension(x, |s, j, y| !s.eval(a, j, y) || s.eval(b, j, y))
            }
            Node::Tensor(a, b) => self.every_extension(x, |s, j, y| {
                (0..s.atom_bits.len()).all(|p| {
                    let bit = s.atom_bits[p];
                    s.derives(j, bit) || !s.conditional(id, p, j, y, &[a, b])
                })
            }),
            Node::Oplus(a, b) => self.every_extension(x, |s, j, y| {
                (0..s.atom_bits.len()).all(|p| {
                    let bit = s.atom_bits[p];
                    s.derives(j, bit) || !(s.conditional(a, p, j, y, &[a]) && s.conditional(b, p, j, y, &[b]))
                })
            }),
            Node::Implies { ref rules, body } => match self.lat.augment(x, rules) {
                Some(j) => {
                    let y = self.lat.unrank(j);
                    self.eval(body, j, &y)
                }
                None => false,
            },
        };
        self.memo[id].insert(i, v);
        v
    }

    /// `hyps ⊩_C P`: every extension of `C` supporting all `hyps` derives `P`.
    /// `key` identifies the hypothesis list in the memo.
    fn conditional(&mut self, key: usize, p: usize, i: usize, x: &[Pos], hyps: &[usize]) -> bool {
        let memo_key = (key, hyps.len(), p, i);
        if let Some(&v) = self.cond_memo.get(&memo_key) {
            return v;
        }
        let bit = self.atom_bits[p];
        let v = self.every_extension(x, |s, j, y| {
            s.derives(j, bit) || !hyps.iter().all(|&h| s.eval(h, j, y))
        });
        self.cond_memo.insert(memo_key, v);
        v
    }
}

/// The atoms of `f` plus those of `extra`, as a vocabulary.
pub fn vocabulary_of<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Atom> {
    formulas.into_iter().flat_map(|f| f.atoms()).collect()
}
