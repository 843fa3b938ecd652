//! Python bindings. Matrices, cubes and DNFs cross the boundary as their
//! text forms; reports come back as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use nullcover::bounds::{self, NearZeroMode};
use nullcover::cube;
use nullcover::dnf::{self, Objective, SolveMode, Verification};
use nullcover::{ensemble, implicant, io, Budget, Error};

create_exception!(nullcover, BudgetExceeded, PyRuntimeError);

fn err(e: Error) -> PyErr {
    if e.is_budget() {
        BudgetExceeded::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn solve_mode(mode: &str) -> PyResult<SolveMode> {
    match mode {
        "exact" => Ok(SolveMode::Exact),
        "greedy" => Ok(SolveMode::Greedy),
        _ => Err(PyValueError::new_err(format!("mode must be 'exact' or 'greedy', got {mode:?}"))),
    }
}

/// Zeros of a Boolean function, one `0`/`1` string per row.
#[pyclass(name = "ZeroMatrix", module = "nullcover", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyZeroMatrix(cube::ZeroMatrix);

#[pymethods]
impl PyZeroMatrix {
    #[new]
    fn new(rows: Vec<String>) -> PyResult<Self> {
        cube::ZeroMatrix::from_strs(&rows).map(PyZeroMatrix).map_err(err)
    }

    #[staticmethod]
    fn empty(n: usize) -> PyResult<Self> {
        cube::ZeroMatrix::empty(n).map(PyZeroMatrix).map_err(err)
    }

    /// Parses the zero-matrix text format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        io::parse_zero_matrix(text).map(PyZeroMatrix).map_err(err)
    }

    /// Zeros of a DIMACS CNF.
    #[staticmethod]
    #[pyo3(signature = (text, cap = io::DEFAULT_EXPANSION_CAP))]
    fn from_cnf(text: &str, cap: usize) -> PyResult<Self> {
        io::parse_nelson_cnf(text, cap).map(PyZeroMatrix).map_err(err)
    }

    fn to_text(&self) -> String {
        io::emit_zero_matrix(&self.0)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    fn rows(&self) -> Vec<String> {
        self.0.rows().map(|p| p.to_string()).collect()
    }

    fn is_zero(&self, point: &str) -> PyResult<bool> {
        Ok(self.0.is_zero(&cube::Point::parse(point).map_err(err)?))
    }

    fn has_adjacent_zeros(&self) -> bool {
        cube::has_adjacent_zeros(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.k()
    }

    fn __repr__(&self) -> String {
        format!("ZeroMatrix(n={}, rows={:?})", self.0.n(), self.rows())
    }
}

/// A disjunction of cubes over `0`, `1`, `-`.
#[pyclass(name = "Dnf", module = "nullcover", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyDnf(cube::Dnf);

#[pymethods]
impl PyDnf {
    #[new]
    fn new(n: usize, cubes: Vec<String>) -> PyResult<Self> {
        let cubes = cubes.iter().map(|c| cube::Cube::parse(c)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        cube::Dnf::new(n, cubes).map(PyDnf).map_err(err)
    }

    #[staticmethod]
    fn from_pla(text: &str) -> PyResult<Self> {
        io::parse_pla(text).map(PyDnf).map_err(err)
    }

    fn to_pla(&self) -> String {
        io::emit_pla(&self.0)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn length(&self) -> usize {
        self.0.length()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn cubes(&self) -> Vec<String> {
        self.0.cubes().iter().map(|c| c.to_string()).collect()
    }

    fn eval(&self, point: &str) -> PyResult<bool> {
        self.0.eval(&cube::Point::parse(point).map_err(err)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Dnf({:?})", self.cubes())
    }
}

#[pyclass(name = "MinimizationResult", module = "nullcover", frozen, get_all)]
struct PyMinimization {
    dnf: PyDnf,
    objective: String,
    value: u64,
    /// Exact LP bound as a fraction string.
    lp_bound: String,
    near_zero_bound: u64,
    lower_bound: u64,
    optimal: bool,
    fallback: bool,
}

#[pymethods]
impl PyMinimization {
    fn __repr__(&self) -> String {
        format!(
            "MinimizationResult({}={}, optimal={}, lower_bound={})",
            self.objective, self.value, self.optimal, self.lower_bound
        )
    }
}

fn run_minimize(m: &PyZeroMatrix, objective: Objective, mode: &str) -> PyResult<PyMinimization> {
    let r = dnf::minimize(&m.0, objective, solve_mode(mode)?, &Budget::default()).map_err(err)?;
    Ok(PyMinimization {
        objective: match objective {
            Objective::Length => "length".into(),
            Objective::Rank => "rank".into(),
        },
        value: r.value,
        lp_bound: r.certificate.lp_bound.to_string(),
        near_zero_bound: r.certificate.near_zero_bound,
        lower_bound: r.certificate.lower_bound(),
        optimal: r.certificate.optimal,
        fallback: r.certificate.fallback,
        dnf: PyDnf(r.dnf),
    })
}

/// Prime implicants in canonical order.
#[pyfunction]
fn enumerate_primes(m: &PyZeroMatrix) -> PyResult<Vec<String>> {
    let p = implicant::enumerate_primes(&m.0).map_err(err)?;
    Ok(p.iter().map(|c| c.to_string()).collect())
}

#[pyfunction]
fn is_prime(m: &PyZeroMatrix, cube: &str) -> PyResult<bool> {
    implicant::is_prime(&m.0, &cube::Cube::parse(cube).map_err(err)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, mode = "exact"))]
fn shortest_dnf(m: &PyZeroMatrix, mode: &str) -> PyResult<PyMinimization> {
    run_minimize(m, Objective::Length, mode)
}

#[pyfunction]
#[pyo3(signature = (m, mode = "exact"))]
fn minimal_dnf(m: &PyZeroMatrix, mode: &str) -> PyResult<PyMinimization> {
    run_minimize(m, Objective::Rank, mode)
}

/// `("valid",)`, `("missed-one", point)` or `("covers-zero", cube, row)`.
#[pyfunction]
fn verify_dnf<'py>(py: Python<'py>, m: &PyZeroMatrix, d: &PyDnf) -> PyResult<Bound<'py, PyAny>> {
    let v = dnf::verify_dnf(&m.0, &d.0).map_err(err)?;
    let t = match v {
        Verification::Valid => ("valid",).into_pyobject(py)?,
        Verification::MissedOne(p) => ("missed-one", p.to_string()).into_pyobject(py)?,
        Verification::CoversZero { cube, row } => ("covers-zero", cube, row).into_pyobject(py)?,
    };
    Ok(t.into_any())
}

/// Θ, Θ⁰ and Θ¹ as lists of point strings.
#[pyfunction]
fn near_zero_points<'py>(py: Python<'py>, m: &PyZeroMatrix) -> PyResult<Bound<'py, PyAny>> {
    let t = bounds::near_zero_points(&m.0);
    let s = |v: &[cube::Point]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
    to_py(
        py,
        &serde_json::json!({"theta": s(&t.points), "theta0": s(&t.theta0), "theta1": s(&t.theta1)}),
    )
}

#[pyfunction]
#[pyo3(signature = (m, mode = "exact"))]
fn near_zero_lower_bound(m: &PyZeroMatrix, mode: &str) -> PyResult<u64> {
    let mode = match mode {
        "exact" => NearZeroMode::ExactCover,
        "counting" => NearZeroMode::Counting,
        _ => return Err(PyValueError::new_err("mode must be 'exact' or 'counting'")),
    };
    Ok(bounds::near_zero_lower_bound(&m.0, mode).map_err(err)?.value)
}

#[pyfunction]
fn table_bounds<'py>(py: Python<'py>, n: u64, k: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &bounds::table_bounds(n, k).map_err(err)?)
}

#[pyfunction]
fn prime_rank_prob_bound(n: u64, k: u64, d: u64) -> PyResult<f64> {
    bounds::prime_rank_prob_bound(n, k, d).map_err(err)
}

#[pyfunction]
fn length_lower_bound(n: u64, k: u64) -> PyResult<f64> {
    bounds::length_lower_bound(n, k).map_err(err)
}

#[pyfunction]
fn layer_function(n: usize, w: usize) -> PyResult<PyZeroMatrix> {
    bounds::layer_function(n, w, &Budget::default()).map(PyZeroMatrix).map_err(err)
}

#[pyfunction]
fn sample_function(n: usize, k: usize, seed: u64) -> PyResult<PyZeroMatrix> {
    ensemble::sample_function(n, k, seed).map(PyZeroMatrix).map_err(err)
}

/// Per-sample records as dicts.
#[pyfunction]
#[pyo3(signature = (n, k, samples, seed = 0))]
fn run_length_experiment<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ensemble::EnsembleConfig::new(n, k, samples, seed);
    let run = py.detach(|| ensemble::run_length_experiment(&cfg)).map_err(err)?;
    to_py(py, &run)
}

#[pyfunction]
#[pyo3(signature = (n, k, samples, d, seed = 0))]
fn estimate_prime_rank_prob<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    samples: usize,
    d: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ensemble::EnsembleConfig::new(n, k, samples, seed);
    let e = py.detach(|| ensemble::estimate_prime_rank_prob(&cfg, d)).map_err(err)?;
    to_py(py, &e)
}

#[pyfunction]
fn concentration_stats<'py>(py: Python<'py>, lengths: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &ensemble::concentration_stats(&lengths).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "nullcover")]
fn nullcover_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyZeroMatrix>()?;
    m.add_class::<PyDnf>()?;
    m.add_class::<PyMinimization>()?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add_function(wrap_pyfunction!(enumerate_primes, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(shortest_dnf, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_dnf, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dnf, m)?)?;
    m.add_function(wrap_pyfunction!(near_zero_points, m)?)?;
    m.add_function(wrap_pyfunction!(near_zero_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(table_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(prime_rank_prob_bound, m)?)?;
    m.add_function(wrap_pyfunction!(length_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(layer_function, m)?)?;
    m.add_function(wrap_pyfunction!(sample_function, m)?)?;
    m.add_function(wrap_pyfunction!(run_length_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_prime_rank_prob, m)?)?;
    m.add_function(wrap_pyfunction!(concentration_stats, m)?)?;
    Ok(())
}
