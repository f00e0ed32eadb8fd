use flatdirac::cli::{load_group, load_rho, load_spin};
use flatdirac::error::Error;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(flatdirac_py, FlatDiracError, PyException);

fn err(e: Error) -> PyErr {
    FlatDiracError::new_err(format!("{}: {}", e.code(), e))
}

fn loads<'py>(py: Python<'py>, s: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (s,))
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| err(Error::Internal(e.to_string())))?;
    loads(py, &s)
}

/// Summary of a group given by registry name or JSON.
#[pyfunction]
fn describe<'py>(py: Python<'py>, group: &str) -> PyResult<Bound<'py, PyAny>> {
    let g = load_group(group).map_err(err)?;
    let v = serde_json::json!({
        "n": g.dim(),
        "holonomy_order": g.order(),
        "orientable": g.is_orientable(),
        "z2_rank": g.z2_rank(),
        "betti": flatdirac::hodge::betti_vector(&g).map_err(err)?,
        "spin_structures": flatdirac::spin::count_spin_structures(&g).map_err(err)?,
        "group": g.to_json(),
    });
    to_py(py, &v)
}

#[pyfunction]
fn spin_structures<'py>(py: Python<'py>, group: &str) -> PyResult<Bound<'py, PyAny>> {
    let g = load_group(group).map_err(err)?;
    let all = flatdirac::spin::enumerate_spin_structures(&g).map_err(err)?;
    let v: Vec<_> = all
        .iter()
        .map(|e| serde_json::json!({"delta": e.delta, "sigma": e.sigma, "trivial_type": e.is_trivial_type()}))
        .collect();
    to_py(py, &v)
}

/// Multiplicities `(4μ², d⁺, d⁻)` plus harmonic spinors.
#[pyfunction]
#[pyo3(signature = (group, spin = "0", max_4mu2 = 40, rho = None))]
fn dirac_spectrum<'py>(
    py: Python<'py>,
    group: &str,
    spin: &str,
    max_4mu2: u64,
    rho: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let g = load_group(group).map_err(err)?;
    let eps = load_spin(&g, spin).map_err(err)?;
    let rho = load_rho(&g, rho).map_err(err)?;
    let t = py
        .detach(|| flatdirac::dirac::dirac_spectrum(&g, &eps, &rho, max_4mu2))
        .map_err(err)?;
    loads(py, &t.to_json())
}

#[pyfunction]
#[pyo3(signature = (group, spin = "plus", samples = vec![]))]
fn eta<'py>(py: Python<'py>, group: &str, spin: &str, samples: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let g = load_group(group).map_err(err)?;
    let eps = load_spin(&g, spin).map_err(err)?;
    let rho = flatdirac::dirac::HolonomyCharacter::trivial(&g);
    let r = flatdirac::eta::eta_z2k(&g, &eps, &rho, &samples).map_err(err)?;
    loads(py, &r.to_json())
}

/// `{4μ²: multiplicity}` on p-forms.
#[pyfunction]
#[pyo3(signature = (group, p, max_4mu2 = 40))]
fn hodge_spectrum(py: Python<'_>, group: &str, p: usize, max_4mu2: u64) -> PyResult<std::collections::BTreeMap<u64, u64>> {
    let g = load_group(group).map_err(err)?;
    py.detach(|| flatdirac::hodge::pform_spectrum(&g, p, max_4mu2)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (group, cap = 25))]
fn length_spectrum<'py>(py: Python<'py>, group: &str, cap: i64) -> PyResult<Bound<'py, PyAny>> {
    let g = load_group(group).map_err(err)?;
    let l = py.detach(|| flatdirac::isospec::length_spectrum(&g, cap)).map_err(err)?;
    to_py(py, &l)
}

#[pyfunction]
#[pyo3(signature = (pmax = 503, extended = false))]
fn zp_table<'py>(py: Python<'py>, pmax: u64, extended: bool) -> PyResult<Bound<'py, PyAny>> {
    let rows = py.detach(|| flatdirac::zp::zp_table(pmax, extended)).map_err(err)?;
    to_py(py, &rows)
}

#[pyfunction]
#[pyo3(signature = (max_4mu2 = 100, length_cap = 25))]
fn table1<'py>(py: Python<'py>, max_4mu2: u64, length_cap: i64) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| flatdirac::isospec::table1_report(max_4mu2, length_cap)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn hurwitz_zeta(s: f64, a: f64) -> PyResult<f64> {
    flatdirac::eta::hurwitz_zeta(s, a).map_err(err)
}

#[pyfunction]
fn krawtchouk<'py>(py: Python<'py>, p: usize, n: usize, x: usize) -> PyResult<Bound<'py, PyAny>> {
    let k = flatdirac::hodge::krawtchouk(p, n, x).map_err(err)?;
    py.import("builtins")?.getattr("int")?.call1((k.to_string(),))
}

#[pymodule]
fn flatdirac_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FlatDiracError", m.py().get_type::<FlatDiracError>())?;
    m.add_function(wrap_pyfunction!(describe, m)?)?;
    m.add_function(wrap_pyfunction!(spin_structures, m)?)?;
    m.add_function(wrap_pyfunction!(dirac_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(eta, m)?)?;
    m.add_function(wrap_pyfunction!(hodge_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(length_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(zp_table, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(hurwitz_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(krawtchouk, m)?)?;
    Ok(())
}
