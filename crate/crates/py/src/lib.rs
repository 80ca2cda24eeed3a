//! Python bindings. Exact values cross the boundary as `fractions.Fraction`;
//! solver reports come back as the same JSON the command line prints, parsed
//! into dictionaries.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use rainbow_core::certificate::{load_certificate, verify_with_limit};
use rainbow_core::constructions::{conjectured_f, limit_densities};
use rainbow_core::densities::{count_rainbow_triangles, density_expression, Expression};
use rainbow_core::optimizers::library::{bounds_report, derive_x_bounds, library_entry, library_names, run_entry};
use rainbow_core::rational::fmt_rational;
use rainbow_core::search::max_rainbow_exhaustive;
use rainbow_core::{canonical_form, census_cached, Mode, Rational};

fn err(e: rainbow_core::Error) -> PyErr {
    match e {
        rainbow_core::Error::Solver(_) | rainbow_core::Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_rational(r),))
}

fn from_json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.getattr("loads")?.call1((text,))
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse().map_err(err)
}

/// A 3-edge-coloring of a complete graph.
#[pyclass(name = "ColoredGraph", module = "rainbow", frozen)]
struct PyGraph {
    inner: rainbow_core::ColoredGraph,
}

#[pymethods]
impl PyGraph {
    /// Parses the `n:colors` text form.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        rainbow_core::ColoredGraph::decode(text).map(|inner| PyGraph { inner }).map_err(err)
    }

    /// `R^k`: RB1111 blown up into itself, on `4^k` vertices.
    #[staticmethod]
    fn iterated_blowup(k: usize) -> PyResult<Self> {
        rainbow_core::constructions::iterated_blowup(k).map(|inner| PyGraph { inner }).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn color(&self, i: usize, j: usize) -> PyResult<u8> {
        let n = self.inner.n();
        if i >= n || j >= n || i == j {
            return Err(PyValueError::new_err(format!("no edge {i}-{j} on {n} vertices")));
        }
        Ok(self.inner.color(i, j))
    }

    fn encode(&self) -> String {
        self.inner.encode()
    }

    fn rainbow_triangles(&self) -> u64 {
        count_rainbow_triangles(&self.inner)
    }

    /// Induced density of a named expression such as `RBT` or `RB2211`.
    fn density<'py>(&self, py: Python<'py>, expression: &str) -> PyResult<Bound<'py, PyAny>> {
        let e = Expression::ALL
            .into_iter()
            .find(|e| e.name() == expression)
            .ok_or_else(|| PyValueError::new_err(format!("unknown expression {expression:?}")))?;
        fraction(py, &density_expression(e, &self.inner).map_err(err)?)
    }

    /// Canonical key under `mode` (`exact` or `colorblind`).
    #[pyo3(signature = (mode = "colorblind"))]
    fn canonical(&self, mode: &str) -> PyResult<String> {
        canonical_form(&self.inner, parse_mode(mode)?).map(|k| k.to_string()).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ColoredGraph('{}')", self.inner.encode())
    }
}

/// Number of isomorphism classes on `level` vertices.
#[pyfunction]
#[pyo3(signature = (level, mode = "colorblind", cache_dir = None))]
fn census_count(py: Python<'_>, level: usize, mode: &str, cache_dir: Option<PathBuf>) -> PyResult<usize> {
    let mode = parse_mode(mode)?;
    py.detach(|| census_cached(level, mode, cache_dir.as_deref()).map(|c| c.len())).map_err(err)
}

/// Rainbow triangles of the balanced recursive construction on `n` vertices.
#[pyfunction]
fn recursive_count(n: usize) -> PyResult<u128> {
    if n == 0 {
        return Err(PyValueError::new_err("n must be positive"));
    }
    Ok(conjectured_f(n))
}

/// Maximum rainbow triangle count over all colorings of K_n, with witnesses.
#[pyfunction]
#[pyo3(signature = (n, prune = false))]
fn search<'py>(py: Python<'py>, n: usize, prune: bool) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(|| max_rainbow_exhaustive(n, prune)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("maximum", r.maximum)?;
    d.set_item("explored", r.explored)?;
    d.set_item("witnesses", r.witnesses.iter().map(|k| k.to_string()).collect::<Vec<_>>())?;
    Ok(d)
}

/// Checks a certificate file; returns the verdict with up to `max_diagnostics` offenders.
#[pyfunction]
#[pyo3(signature = (path, max_diagnostics = 10))]
fn verify_certificate<'py>(py: Python<'py>, path: PathBuf, max_diagnostics: usize) -> PyResult<Bound<'py, PyDict>> {
    let v = py
        .detach(|| load_certificate(&path).and_then(|c| verify_with_limit(&c, max_diagnostics)))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("accepted", v.accepted)?;
    d.set_item("nonzero", v.nonzero)?;
    let offenders = PyList::empty(py);
    for o in &v.diagnostics {
        offenders.append((o.census_id, o.key.as_str(), o.residual.as_str()))?;
    }
    d.set_item("diagnostics", offenders)?;
    Ok(d)
}

/// Limit densities of the iterated blow-up, keyed by expression name.
#[pyfunction]
fn limits<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (e, r) in limit_densities() {
        d.set_item(e.name(), fraction(py, &r)?)?;
    }
    Ok(d)
}

#[pyfunction]
fn programs() -> Vec<String> {
    library_names()
}

/// Runs a library program and returns its report.
#[pyfunction]
fn solve<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    let entry = library_entry(name).map_err(err)?;
    let report = py.detach(|| run_entry(entry).map(|r| r.report())).map_err(err)?;
    from_json(py, &serde_json::to_string(&report).expect("reports serialize"))
}

/// Derives the partition bounds; each entry records whether it matches the stated value.
#[pyfunction]
fn bounds<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    let checks = py.detach(derive_x_bounds).map_err(err)?;
    from_json(py, &serde_json::to_string(&bounds_report(&checks)).expect("reports serialize"))
}

#[pymodule]
pub fn rainbow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(census_count, m)?)?;
    m.add_function(wrap_pyfunction!(recursive_count, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(limits, m)?)?;
    m.add_function(wrap_pyfunction!(programs, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    Ok(())
}
