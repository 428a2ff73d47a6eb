//! Python bindings: `import adiabatic_dicke`.

use dicke::eigensolver::quartic_constants as core_quartic_constants;
use dicke::model::{reduce as core_reduce, thermo_limit as core_thermo_limit, ModelParams};
use dicke::scaling::{fit_exponent as core_fit_exponent, symanzik_map as core_symanzik_map, Observable, ScalingPoint, Transform};
use dicke::sweep::{ordered_grid, solve_points, PointSolution};
use dicke::validation::run_invariants as core_run_invariants;
use dicke::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::InvalidGrid(_) | Error::UnknownObservable(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(frozen, get_all, skip_from_py_object)]
struct QuarticConstants {
    beta0: f64,
    beta1: f64,
    k_const: f64,
    beta0_error: f64,
    beta1_error: f64,
    k_error: f64,
}

#[pymethods]
impl QuarticConstants {
    fn __repr__(&self) -> String {
        format!(
            "QuarticConstants(beta0={}, beta1={}, k_const={})",
            self.beta0, self.beta1, self.k_const
        )
    }
}

/// One solved `(alpha, N)` point; the attributes match the CSV columns.
#[pyclass(frozen, get_all, skip_from_py_object)]
struct Point {
    alpha: f64,
    n_qubits: u64,
    d_ratio: f64,
    e0_reduced: f64,
    e0_per_nd: f64,
    sx_per_n: f64,
    sx2_per_n2: f64,
    sy2_per_n2: f64,
    sz2_per_n2: f64,
    q2: f64,
    q4: f64,
    p2: f64,
    order_param: f64,
    tau1: f64,
    tau_n: f64,
    qubit_purity: f64,
    phi_m1: f64,
    phi_mhalf: f64,
    phi_phalf: f64,
    converged: bool,
}

impl From<&PointSolution> for Point {
    fn from(s: &PointSolution) -> Self {
        let o = &s.observables;
        Self {
            alpha: s.alpha,
            n_qubits: s.n_qubits,
            d_ratio: s.d_ratio,
            e0_reduced: o.e0_reduced,
            e0_per_nd: o.e0_per_nd(),
            sx_per_n: o.sx_per_n,
            sx2_per_n2: o.sx2_per_n2,
            sy2_per_n2: o.sy2_per_n2,
            sz2_per_n2: o.sz2_per_n2,
            q2: o.q2,
            q4: o.q4,
            p2: o.p2,
            order_param: o.order_param,
            tau1: s.tangles.tau1,
            tau_n: s.tangles.tau_n,
            qubit_purity: s.tangles.purity,
            phi_m1: o.phi.minus_one,
            phi_mhalf: o.phi.minus_half,
            phi_phalf: o.phi.plus_half,
            converged: s.converged,
        }
    }
}

#[pymethods]
impl Point {
    fn __repr__(&self) -> String {
        format!(
            "Point(alpha={}, n_qubits={}, d_ratio={}, sx_per_n={}, e0_reduced={})",
            self.alpha, self.n_qubits, self.d_ratio, self.sx_per_n, self.e0_reduced
        )
    }
}

#[pyfunction]
#[pyo3(signature = (tol = 1e-8))]
fn quartic_constants(py: Python<'_>, tol: f64) -> PyResult<QuarticConstants> {
    let c = py.detach(|| core_quartic_constants(tol)).map_err(to_py)?;
    Ok(QuarticConstants {
        beta0: c.beta0,
        beta1: c.beta1,
        k_const: c.k_const,
        beta0_error: c.beta0_error,
        beta1_error: c.beta1_error,
        k_error: c.k_error,
    })
}

/// Solves every `(alpha, N)` pair; results sorted by `(N, alpha)`.
#[pyfunction]
#[pyo3(signature = (alphas, n_qubits, d_ratio = 10.0, tol = 1e-8))]
fn sweep(py: Python<'_>, alphas: Vec<f64>, n_qubits: Vec<u64>, d_ratio: f64, tol: f64) -> PyResult<Vec<Point>> {
    let grid = ordered_grid(&alphas, &n_qubits);
    let results = py.detach(|| solve_points(&grid, d_ratio, tol));
    results
        .into_iter()
        .map(|r| r.map(|s| Point::from(&s)).map_err(to_py))
        .collect()
}

#[pyfunction]
#[pyo3(signature = (alpha, n_qubits, d_ratio = 10.0, tol = 1e-8))]
fn solve(py: Python<'_>, alpha: f64, n_qubits: u64, d_ratio: f64, tol: f64) -> PyResult<Point> {
    Ok(sweep(py, vec![alpha], vec![n_qubits], d_ratio, tol)?.remove(0))
}

#[pyfunction]
#[pyo3(signature = (alpha, d_ratio = 10.0))]
fn thermo_limit<'py>(py: Python<'py>, alpha: f64, d_ratio: f64) -> PyResult<Bound<'py, PyDict>> {
    let t = core_thermo_limit(alpha, d_ratio);
    let d = PyDict::new(py);
    d.set_item("sx_per_n", t.sx_per_n)?;
    d.set_item("sx2_per_n2", t.sx2_per_n2)?;
    d.set_item("sy2_per_n2", t.sy2_per_n2)?;
    d.set_item("sz2_per_n2", t.sz2_per_n2)?;
    d.set_item("order_param", t.order_param)?;
    d.set_item("e0_per_n", t.e0_per_n)?;
    d.set_item("tau_inf", t.tau_infinity)?;
    Ok(d)
}

/// `(d_ratio, l_coupling, alpha, nd)` from `(omega, delta, coupling, N)`.
#[pyfunction]
fn reduce(omega: f64, delta: f64, coupling: f64, n_qubits: u64) -> PyResult<(f64, f64, f64, f64)> {
    let p = ModelParams::new(omega, delta, coupling, n_qubits)
        .and_then(|m| core_reduce(&m))
        .map_err(to_py)?;
    Ok((p.d_ratio, p.l_coupling, p.alpha, p.nd))
}

/// `(zeta, q_scale, energy_scale)`
#[pyfunction]
fn symanzik_map(alpha: f64, nd: f64) -> PyResult<(f64, f64, f64)> {
    let m = core_symanzik_map(alpha, nd).map_err(to_py)?;
    Ok((m.zeta, m.q_scale, m.energy_scale))
}

/// Power law `value ≈ prefactor·N^exponent`; returns `(exponent, prefactor, r_squared)`.
#[pyfunction]
#[pyo3(signature = (n_qubits, values, transform = "identity"))]
fn fit_exponent(n_qubits: Vec<u64>, values: Vec<f64>, transform: &str) -> PyResult<(f64, f64, f64)> {
    if n_qubits.len() != values.len() {
        return Err(PyValueError::new_err("n_qubits and values differ in length"));
    }
    let transform: Transform = transform.parse().map_err(to_py)?;
    let points: Vec<ScalingPoint> = n_qubits
        .iter()
        .zip(&values)
        .map(|(&n, &value)| ScalingPoint {
            n_qubits: n,
            d_ratio: f64::NAN,
            alpha: f64::NAN,
            observable: Observable::SxPerN,
            value,
        })
        .collect();
    let f = core_fit_exponent(&points, transform).map_err(to_py)?;
    Ok((f.exponent, f.prefactor, f.r_squared))
}

/// `(name, passed, measured, bound, detail)` for every invariant check.
#[pyfunction]
#[pyo3(signature = (tol = 1e-9))]
fn run_invariants(py: Python<'_>, tol: f64) -> Vec<(String, bool, f64, f64, String)> {
    py.detach(|| core_run_invariants(tol))
        .into_iter()
        .map(|o| (o.name, o.passed, o.measured, o.bound, o.detail))
        .collect()
}

#[pymodule]
#[pyo3(name = "adiabatic_dicke")]
fn adiabatic_dicke_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<QuarticConstants>()?;
    m.add_class::<Point>()?;
    m.add_function(wrap_pyfunction!(quartic_constants, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(thermo_limit, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(symanzik_map, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(run_invariants, m)?)?;
    Ok(())
}
