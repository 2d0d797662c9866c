use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyModule>)>(f: F) {
    Python::attach(|py| {
        let m = PyModule::new(py, "idealc").unwrap();
        idealc_py::idealc_module(&m).unwrap();
        f(py, &m);
    });
}

fn eval_py<'py>(py: Python<'py>, m: &Bound<'py, PyModule>, code: &str) -> Bound<'py, PyAny> {
    let globals = pyo3::types::PyDict::new(py);
    globals.set_item("idealc", m).unwrap();
    let code = std::ffi::CString::new(code).unwrap();
    py.eval(&code, Some(&globals), None).unwrap()
}

#[test]
fn submeasure_values() {
    with_module(|py, m| {
        let v: String = eval_py(py, m, "idealc.Submeasure('ib').eval([3, 4, 5, 6])").extract().unwrap();
        assert_eq!(v, "4");
        let v: String = eval_py(py, m, "idealc.Submeasure('summable:1/(n+1)').eval([0, 1])").extract().unwrap();
        assert_eq!(v, "3/2");
        let ok: bool = eval_py(py, m, "idealc.Submeasure('edfin').check_axioms(7, trials=20)['passed']")
            .extract()
            .unwrap();
        assert!(ok);
    });
}

#[test]
fn bad_input_raises_value_error() {
    with_module(|py, m| {
        let globals = pyo3::types::PyDict::new(py);
        globals.set_item("idealc", m).unwrap();
        let r = py.eval(c"idealc.Ideal('Bogus')", Some(&globals), None);
        let e = r.unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
    });
}

#[test]
fn classify_and_replay() {
    with_module(|py, m| {
        let v: String = eval_py(py, m, "idealc.Ideal('BI').classify()['attributes']['egorov']['value']")
            .extract()
            .unwrap();
        assert_eq!(v, "Yes");
        let ok: bool = eval_py(
            py,
            m,
            "__import__('json').dumps(idealc.Ideal('Mazur').classify()['derivation'])",
        )
        .extract::<String>()
        .map(|text| {
            let d: idealc::classifier::Derivation = serde_json::from_str(&text).unwrap();
            idealc::classifier::replay(&d).is_ok()
        })
        .unwrap();
        assert!(ok);
        let rows: usize = eval_py(py, m, "sum(r['expected'] == r['derived'] for r in idealc.golden())")
            .extract()
            .unwrap();
        assert_eq!(rows, 15);
    });
}

#[test]
fn member_and_hull() {
    with_module(|py, m| {
        let v: String = eval_py(py, m, "idealc.Ideal('Fin (x) Fin').member('(column 0)', prefix=64)['verdict']")
            .extract()
            .unwrap();
        assert_eq!(v, "ProvedIn");
        let gap: String = eval_py(py, m, "idealc.Submeasure('counting').hull([0, 2, 4], prefix=6)['gap']")
            .extract()
            .unwrap();
        assert_eq!(gap, "0");
    });
}

#[test]
fn cli_round_trip() {
    with_module(|py, m| {
        let code: i32 = eval_py(py, m, "idealc.cli(['catalogue', 'list'])[0]").extract().unwrap();
        assert_eq!(code, 0);
        let code: i32 = eval_py(py, m, "idealc.cli(['frobnicate'])[0]").extract().unwrap();
        assert_eq!(code, 2);
    });
}
