//! Python bindings: formulas, bases, bases of bases and the judgments over them.

use std::collections::BTreeSet;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use baselab::oracles;
use baselab::support::DEFAULT_MAX_ENUM;

fn err(e: baselab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A formula of the intrinsic/extrinsic language.
#[pyclass(module = "baselab_py", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Formula {
    inner: baselab::Formula,
}

#[pymethods]
impl Formula {
    #[new]
    fn py_new(text: &str) -> PyResult<Self> {
        baselab::parse_formula(text).map(|inner| Formula { inner }).map_err(err)
    }

    fn atoms(&self) -> Vec<String> {
        self.inner.atoms().iter().map(|a| a.to_string()).collect()
    }

    fn fragment(&self) -> String {
        baselab::fragment_of(&self.inner).to_string()
    }

    fn is_clausal(&self) -> bool {
        baselab::is_clausal(&self.inner)
    }

    /// The base this clausal formula denotes.
    fn to_base(&self) -> PyResult<Base> {
        baselab::formula_to_base(&self.inner).map(|inner| Base { inner }).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.inner.to_string())
    }
}

/// A finite set of atomic rules.
#[pyclass(module = "baselab_py", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Base {
    inner: baselab::Base,
}

#[pymethods]
impl Base {
    #[new]
    #[pyo3(signature = (text = ""))]
    fn py_new(text: &str) -> PyResult<Self> {
        baselab::parse_base(text).map(|inner| Base { inner }).map_err(err)
    }

    fn rules(&self) -> Vec<String> {
        self.inner.iter().map(|r| r.to_string()).collect()
    }

    fn union(&self, other: &Base) -> Base {
        Base { inner: self.inner.union(&other.inner) }
    }

    fn issubset(&self, other: &Base) -> bool {
        self.inner.is_subset(&other.inner)
    }

    /// Whether `goal` follows from the assumption atoms.
    #[pyo3(signature = (goal, assumptions = Vec::new()))]
    fn derives(&self, goal: &str, assumptions: Vec<String>) -> PyResult<bool> {
        let gamma = assumptions
            .iter()
            .map(|a| baselab::Atom::new(a.as_str()))
            .collect::<Result<BTreeSet<_>, _>>()
            .map_err(err)?;
        let goal = baselab::Atom::new(goal).map_err(err)?;
        Ok(baselab::derives(&self.inner, &gamma, &goal))
    }

    fn to_formula(&self) -> PyResult<Formula> {
        baselab::base_to_formula(&self.inner).map(|inner| Formula { inner }).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        baselab::render_base(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Base({:?})", baselab::render_base(&self.inner).trim_end())
    }
}

/// A basis together with an evaluation strategy and its caches.
#[pyclass(module = "baselab_py", frozen)]
struct SupportContext {
    inner: baselab::SupportContext,
}

#[pymethods]
impl SupportContext {
    #[new]
    #[pyo3(signature = (vocab, basis = "b2", fresh = 1, max_premises = 2, max_discharge = 1, max_rules = Some(3), strategy = "auto", max_enum = None))]
    #[allow(clippy::too_many_arguments)]
    fn py_new(
        vocab: Vec<String>,
        basis: &str,
        fresh: usize,
        max_premises: usize,
        max_discharge: usize,
        max_rules: Option<usize>,
        strategy: &str,
        max_enum: Option<u128>,
    ) -> PyResult<Self> {
        let level: baselab::BasisLevel = basis.parse().map_err(err)?;
        let atoms = vocab
            .iter()
            .map(|a| baselab::Atom::new(a.as_str()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let spec = baselab::BasisSpec::new(atoms, level)
            .with_max_premises(max_premises)
            .with_max_discharge(max_discharge)
            .with_max_rules(max_rules)
            .with_fresh(fresh);
        let strategy: baselab::Strategy = strategy.parse().map_err(err)?;
        baselab::SupportContext::with_options(spec, strategy, max_enum.unwrap_or(DEFAULT_MAX_ENUM))
            .map(|inner| SupportContext { inner })
            .map_err(err)
    }

    #[getter]
    fn vocab(&self) -> Vec<String> {
        self.inner.spec().vocab.iter().map(|a| a.to_string()).collect()
    }

    fn universe_size(&self) -> usize {
        self.inner.universe().len()
    }

    fn supports(&self, py: Python<'_>, base: &Base, formula: &Formula) -> PyResult<bool> {
        py.detach(|| self.inner.supports(&base.inner, &formula.inner)).map_err(err)
    }

    fn entails(&self, py: Python<'_>, base: &Base, hypotheses: Vec<Formula>, formula: &Formula) -> PyResult<bool> {
        let hyps: Vec<baselab::Formula> = hypotheses.into_iter().map(|h| h.inner).collect();
        py.detach(|| self.inner.entails(&base.inner, &hyps, &formula.inner)).map_err(err)
    }

    fn valid(&self, py: Python<'_>, formula: &Formula) -> PyResult<bool> {
        py.detach(|| self.inner.valid(&formula.inner)).map_err(err)
    }

    fn countermodel(&self, py: Python<'_>, formula: &Formula) -> PyResult<Option<Base>> {
        py.detach(|| self.inner.countermodel(&formula.inner))
            .map(|b| b.map(|inner| Base { inner }))
            .map_err(err)
    }

    /// `(support_valid, oracle_valid, agree)` against the oracle for this basis level.
    fn compare(&self, py: Python<'_>, formula: &Formula) -> PyResult<(bool, bool, bool)> {
        let c = py.detach(|| baselab::compare(&self.inner, &formula.inner)).map_err(err)?;
        Ok((c.support_valid, c.oracle_valid, c.agree))
    }

    fn stats(&self) -> (u64, u64) {
        let s = self.inner.stats();
        (s.bases_enumerated, s.cache_hits)
    }
}

#[pyfunction]
fn classical_valid(formula: &Formula) -> PyResult<bool> {
    let mapped = oracles::map_extrinsic(&formula.inner).map_err(err)?;
    oracles::classical_valid(&mapped).map_err(err)
}

#[pyfunction]
fn intuitionistic_valid(formula: &Formula) -> PyResult<bool> {
    let mapped = oracles::map_extrinsic(&formula.inner).map_err(err)?;
    Ok(oracles::intuitionistic_valid(&mapped))
}

#[pymodule]
fn baselab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<Base>()?;
    m.add_class::<SupportContext>()?;
    m.add_function(wrap_pyfunction!(classical_valid, m)?)?;
    m.add_function(wrap_pyfunction!(intuitionistic_valid, m)?)?;
    Ok(())
}
