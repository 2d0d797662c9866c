//! Python module `idealc`: submeasures, ideal expressions, the classifier and the hull LP.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use idealc::classifier::{self, Derivation};
use idealc::ground::{FiniteSet, SetDescription};
use idealc::ideals::Budget;
use idealc::pathology::{self, Family};
use idealc::submeasures::{self, Submeasure as CoreSubmeasure};

fn err(e: idealc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serialize through JSON so Python gets plain dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A catalogued lsc submeasure, e.g. `Submeasure("ib")` or `Submeasure("summable:1/(n+1)")`.
#[pyclass(name = "Submeasure", frozen)]
struct PySubmeasure {
    inner: CoreSubmeasure,
}

#[pymethods]
impl PySubmeasure {
    #[new]
    fn new(id: &str) -> PyResult<Self> {
        CoreSubmeasure::catalogue(id).map(|inner| PySubmeasure { inner }).map_err(err)
    }

    #[staticmethod]
    fn ids() -> Vec<&'static str> {
        CoreSubmeasure::catalogue_ids()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn space(&self) -> String {
        self.inner.space.to_string()
    }

    /// Exact value as a string: `"p/q"`, an integer, or `"inf"`.
    fn eval(&self, codes: Vec<u64>) -> PyResult<String> {
        let set = FiniteSet::new(self.inner.space.clone(), codes).map_err(err)?;
        self.inner.eval(&set).map(|v| v.to_string()).map_err(err)
    }

    #[pyo3(signature = (seed, prefix = 64, trials = 1000))]
    fn check_axioms<'py>(&self, py: Python<'py>, seed: u64, prefix: u64, trials: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &submeasures::check_axioms(&self.inner, prefix, trials, seed))
    }

    /// Hull LP on the ground `ground` (default: the first `prefix` codes) for the objective `set`.
    #[pyo3(signature = (set = None, ground = None, prefix = 12, reduced = false))]
    fn hull<'py>(
        &self,
        py: Python<'py>,
        set: Option<Vec<u64>>,
        ground: Option<Vec<u64>>,
        prefix: u64,
        reduced: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let space = self.inner.space.clone();
        let ground = match ground {
            Some(g) => FiniteSet::new(space.clone(), g),
            None => FiniteSet::prefix(space.clone(), prefix),
        }
        .map_err(err)?;
        let a = match set {
            Some(s) => FiniteSet::new(space, s).map_err(err)?,
            None => ground.clone(),
        };
        let family = if reduced { Family::Reduced } else { Family::Exhaustive };
        to_py(py, &pathology::hull(&self.inner, &ground, &a, family).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Submeasure({:?})", self.inner.label)
    }
}

/// A parsed ideal expression, e.g. `Ideal("Fin (x) Fin")`.
#[pyclass(name = "Ideal", frozen)]
struct PyIdeal {
    inner: classifier::IdealExpr,
}

#[pymethods]
impl PyIdeal {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        classifier::IdealExpr::parse(text).map(|inner| PyIdeal { inner }).map_err(err)
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &classifier::classify(&self.inner))
    }

    /// Membership verdict for a set given as an s-expression such as `"(column 0)"`.
    #[pyo3(signature = (set, prefix = 1024, level = 5, depth = 8))]
    fn member<'py>(&self, py: Python<'py>, set: &str, prefix: u64, level: u64, depth: u32) -> PyResult<Bound<'py, PyAny>> {
        let oracle = self.inner.oracle().map_err(err)?;
        let d: SetDescription = set.parse().map_err(err)?;
        let v = oracle.decide(&d, Budget { prefix, level, depth }).map_err(err)?;
        to_py(py, &v)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Ideal({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Check a derivation given as JSON text (or a dict already dumped to text).
#[pyfunction]
fn replay(derivation: &str) -> PyResult<bool> {
    let d: Derivation = serde_json::from_str(derivation).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(classifier::replay(&d).is_ok())
}

#[pyfunction]
fn golden(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &classifier::example_verdicts())
}

#[pyfunction]
#[pyo3(signature = (name, level = None))]
fn run_construction<'py>(py: Python<'py>, name: &str, level: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    let level = level.unwrap_or_else(|| idealc::reductions::suites::default_level(name));
    to_py(py, &idealc::reductions::run_construction(name, level).map_err(err)?)
}

/// Run the command line with `args` (without the program name); returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn cli(args: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let argv = std::iter::once("idealc".to_string()).chain(args);
    let code = idealc::cli::run(argv, &mut out, &mut errs);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&errs).into_owned(),
    )
}

#[pymodule]
#[pyo3(name = "idealc")]
pub fn idealc_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySubmeasure>()?;
    m.add_class::<PyIdeal>()?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(golden, m)?)?;
    m.add_function(wrap_pyfunction!(run_construction, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}
