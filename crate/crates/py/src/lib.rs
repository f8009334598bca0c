//! Python bindings. Reports come back as plain dicts and lists.

use num_rational::Ratio;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use sarkozy_core::bounds::{bound_value, minimize, DMode};
use sarkozy_core::cli::{parse_polynomial, selftest as run_selftest};
use sarkozy_core::clpcore::{construct as build, degree_audit, pointwise_identity_check};
use sarkozy_core::config::Limits;
use sarkozy_core::extremal::{forbidden_set, max_free_set, Setting};
use sarkozy_core::phimap::PhiMap;
use sarkozy_core::pipeline::{run_pipeline, sweep as run_sweep, SetChoice, SweepConfig};
use sarkozy_core::rankcert::{certify as run_certify, count_monomials as count};
use sarkozy_core::space::Space;
use sarkozy_core::{Elem, Error, FieldSpec, UniPoly};

create_exception!(sarkozy, TheoremViolation, PyRuntimeError);

fn err(e: Error) -> PyErr {
    if e.is_theorem_violation() {
        TheoremViolation::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn d_mode(name: &str) -> PyResult<DMode> {
    match name {
        "paper" => Ok(DMode::Paper),
        "exact" => Ok(DMode::Exact),
        _ => Err(PyValueError::new_err(format!("d_mode must be 'paper' or 'exact', got '{name}'"))),
    }
}

/// Finite field F_q with elements encoded as integers 0..q.
#[pyclass(name = "Field", frozen)]
struct PyField(FieldSpec);

#[pymethods]
impl PyField {
    #[new]
    fn new(q: u64) -> PyResult<Self> {
        FieldSpec::of_order(q).map(PyField).map_err(err)
    }

    #[staticmethod]
    fn with_modulus(p: u32, modulus: Vec<u32>) -> PyResult<Self> {
        FieldSpec::with_modulus(p, &modulus).map(PyField).map_err(err)
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.q()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p()
    }

    #[getter]
    fn e(&self) -> u32 {
        self.0.e()
    }

    #[getter]
    fn modulus(&self) -> Vec<u32> {
        self.0.modulus().to_vec()
    }

    fn add(&self, a: u64, b: u64) -> PyResult<u32> {
        Ok(self.0.add(self.elem(a)?, self.elem(b)?).0)
    }

    fn sub(&self, a: u64, b: u64) -> PyResult<u32> {
        Ok(self.0.sub(self.elem(a)?, self.elem(b)?).0)
    }

    fn mul(&self, a: u64, b: u64) -> PyResult<u32> {
        Ok(self.0.mul(self.elem(a)?, self.elem(b)?).0)
    }

    fn neg(&self, a: u64) -> PyResult<u32> {
        Ok(self.0.neg(self.elem(a)?).0)
    }

    fn inv(&self, a: u64) -> PyResult<u32> {
        self.0.inv(self.elem(a)?).map(|e| e.0).map_err(err)
    }

    fn pow(&self, a: u64, k: u64) -> PyResult<u32> {
        Ok(self.0.pow(self.elem(a)?, k).0)
    }

    /// Parses "b^2+b" or "0,1,1" into coefficient encodings, constant first.
    fn parse(&self, text: &str) -> PyResult<Vec<u32>> {
        let f = parse_polynomial(text, &self.0).map_err(err)?;
        Ok(f.coeffs().iter().map(|c| c.0).collect())
    }

    fn __repr__(&self) -> String {
        format!("Field(q={}, modulus={:?})", self.0.q(), self.0.modulus())
    }
}

impl PyField {
    fn elem(&self, a: u64) -> PyResult<Elem> {
        self.0.elem(a).map_err(err)
    }
}

fn instance(q: u64, f: &str) -> PyResult<(FieldSpec, UniPoly)> {
    let field = FieldSpec::of_order(q).map_err(err)?;
    let poly = parse_polynomial(f, &field).map_err(err)?;
    Ok((field, poly))
}

#[pyfunction]
#[pyo3(signature = (q, k, d_mode="paper", n=None))]
fn bound<'py>(py: Python<'py>, q: u64, k: u64, d_mode: &str, n: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let report = minimize(q, k, self::d_mode(d_mode)?).map_err(err)?;
    let out = to_py(py, &report)?;
    if let Some(n) = n {
        out.set_item("value", to_py(py, &bound_value(&report, n))?)?;
    }
    Ok(out)
}

#[pyfunction]
fn phi<'py>(py: Python<'py>, q: u64, f: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let (field, poly) = instance(q, f)?;
    to_py(py, &PhiMap::build(&field, &poly, n).map_err(err)?.report())
}

/// Builds P and returns its checks, degree audit and pointwise identity report.
#[pyfunction]
fn construct<'py>(py: Python<'py>, q: u64, f: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let (field, poly) = instance(q, f)?;
    let limits = Limits::default();
    let ind = build(&field, &poly, n, &limits).map_err(err)?;
    let identity = pointwise_identity_check(&ind, &limits).map_err(err)?;
    let audit = degree_audit(&ind, ind.d, &limits).map_err(err)?;
    let out = to_py(py, &ind.checks)?;
    out.set_item("deg_p", ind.degree().unwrap_or(0))?;
    out.set_item("degree_bound", ind.claimed_degree_bound.as_f64())?;
    out.set_item("p0", ind.p_at_zero().0)?;
    out.set_item("identity", to_py(py, &identity)?)?;
    out.set_item("audit", to_py(py, &audit)?)?;
    out.set_item("P", to_py(py, &ind.p)?)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (q, f, n, points=None))]
fn certify<'py>(py: Python<'py>, q: u64, f: &str, n: usize, points: Option<Vec<u64>>) -> PyResult<Bound<'py, PyAny>> {
    let (field, poly) = instance(q, f)?;
    let limits = Limits::default();
    let ind = build(&field, &poly, n, &limits).map_err(err)?;
    let points = match points {
        Some(p) => p,
        None => (0..Space::new(field, n).size() as u64).collect(),
    };
    to_py(py, &run_certify(&ind.p, &points, &limits).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (q, f, n, setting="poly"))]
fn search<'py>(py: Python<'py>, q: u64, f: &str, n: usize, setting: &str) -> PyResult<Bound<'py, PyAny>> {
    let setting = match setting {
        "poly" => Setting::PolyRing,
        "field" => Setting::Field,
        other => return Err(PyValueError::new_err(format!("unknown setting '{other}'"))),
    };
    let (field, poly) = instance(q, f)?;
    let limits = Limits::default();
    let fs = forbidden_set(setting, &field, &poly, n, &limits).map_err(err)?;
    to_py(py, &max_free_set(&fs, &limits).map_err(err)?)
}

/// Proof transcript; `a=None` uses a maximum free set.
#[pyfunction]
#[pyo3(signature = (q, f, n, a=None))]
fn prove<'py>(py: Python<'py>, q: u64, f: &str, n: usize, a: Option<Vec<u64>>) -> PyResult<Bound<'py, PyAny>> {
    let (field, poly) = instance(q, f)?;
    let choice = a.map_or(SetChoice::Search, SetChoice::Given);
    to_py(py, &run_pipeline(&field, &poly, n, &choice, &Limits::default()).map_err(err)?)
}

#[pyfunction]
fn sweep<'py>(py: Python<'py>, q: Vec<u64>, k: Vec<usize>, n: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SweepConfig {
        q,
        k,
        n,
        ..Default::default()
    };
    to_py(py, &run_sweep(&cfg).map_err(err)?)
}

/// `|{α ∈ {0..q-1}^n : Σα ≤ num/den}|` as a decimal string.
#[pyfunction]
fn count_monomials(n: usize, q: u64, bound_num: i64, bound_den: i64) -> PyResult<String> {
    if bound_den <= 0 {
        return Err(PyValueError::new_err("denominator must be positive"));
    }
    Ok(count(n, q, Ratio::new(bound_num, bound_den)).to_string())
}

#[pyfunction]
fn selftest<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &run_selftest(&Limits::default()))
}

#[pymodule]
fn sarkozy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add("TheoremViolation", m.py().get_type::<TheoremViolation>())?;
    m.add_function(wrap_pyfunction!(bound, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(prove, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(count_monomials, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
