use rainbow::rainbow as rainbow_module;
use std::sync::Once;

use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<R>(f: impl FnOnce(Python<'_>, &Bound<'_, PyModule>) -> PyResult<R>) -> R {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        pyo3::append_to_inittab!(rainbow_module);
        Python::initialize();
    });
    Python::attach(|py| {
        let m = py.import("rainbow").expect("module registered");
        f(py, &m).expect("python call")
    })
}

#[test]
fn module_exposes_counts_and_exact_densities() {
    with_module(|py, m| {
        let census: usize = m.getattr("census_count")?.call1((5,))?.extract()?;
        let expected = rainbow_core::census_cached(5, rainbow_core::Mode::ColorBlind, None).unwrap().len();
        assert_eq!(census, expected);
        let g = m.getattr("ColoredGraph")?.call_method1("iterated_blowup", (2,))?;
        let count: u64 = g.call_method0("rainbow_triangles")?.extract()?;
        assert_eq!(count, 272);
        let locals = PyDict::new(py);
        locals.set_item("g", &g)?;
        let ok: bool = py
            .eval(c"g.density('RBT') == __import__('fractions').Fraction(34, 70)", None, Some(&locals))?
            .extract()?;
        assert!(ok);
        Ok(())
    });
}

#[test]
fn malformed_graph_raises_value_error() {
    with_module(|py, m| {
        let err = m.getattr("ColoredGraph")?.call1(("3:07",)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        Ok(())
    });
}
