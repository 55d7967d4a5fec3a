//! Python bindings for the collision-model complementarity library.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use complement_opt::complementarity::{triple, ComplementarityTriple, TwoQubitPure};
use complement_opt::excitation::{self, CouplingConfig as CoreConfig};
use complement_opt::experiments;
use complement_opt::measurement::{self, MeasurementBasis};
use complement_opt::optimizer::{self, Objective, OptimizerBudget, SearchMode};

fn py_err(e: complement_opt::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Coupling strength `g`, total time `T` and ancilla count `N`.
#[pyclass(name = "CouplingConfig", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyCouplingConfig {
    inner: CoreConfig,
}

#[pymethods]
impl PyCouplingConfig {
    #[new]
    #[pyo3(signature = (g, total_time, n_total))]
    fn new(g: f64, total_time: f64, n_total: usize) -> PyResult<Self> {
        CoreConfig::new(g, total_time, n_total)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn strong() -> Self {
        Self {
            inner: CoreConfig::strong(),
        }
    }

    #[staticmethod]
    fn weak() -> Self {
        Self {
            inner: CoreConfig::weak(),
        }
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g()
    }

    #[getter]
    fn total_time(&self) -> f64 {
        self.inner.total_time()
    }

    #[getter]
    fn n_total(&self) -> usize {
        self.inner.n_total()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn b(&self) -> Complex64 {
        self.inner.b()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k()
    }

    fn __repr__(&self) -> String {
        format!(
            "CouplingConfig(g={}, total_time={}, n_total={})",
            self.inner.g(),
            self.inner.total_time(),
            self.inner.n_total()
        )
    }
}

/// Result of a basis maximization.
#[pyclass(name = "OptimizationResult", frozen, get_all)]
pub struct PyOptimizationResult {
    objective: String,
    n: usize,
    angles: Vec<(f64, f64)>,
    visibility: f64,
    predictability: f64,
    concurrence: f64,
    closure_residual: f64,
    outcome_probability: f64,
    evaluations: usize,
    converged: bool,
    seed: u64,
    restart: usize,
    /// `(c00, c01, c10)` of the post-measurement state.
    state: (Complex64, Complex64, Complex64),
}

#[pymethods]
impl PyOptimizationResult {
    fn __repr__(&self) -> String {
        format!(
            "OptimizationResult(objective={}, n={}, V={:.6}, P={:.6}, C={:.6})",
            self.objective, self.n, self.visibility, self.predictability, self.concurrence
        )
    }
}

fn triple_tuple(t: ComplementarityTriple) -> (f64, f64, f64, f64) {
    (
        t.visibility,
        t.predictability,
        t.concurrence,
        t.closure_residual,
    )
}

/// Amplitudes `[A1B, ancilla_1..n, 1A]` after `n` collisions.
#[pyfunction]
#[pyo3(signature = (cfg, n, oracle = false))]
fn evolve(cfg: &PyCouplingConfig, n: usize, oracle: bool) -> PyResult<Vec<Complex64>> {
    let state = if oracle {
        excitation::oracle_evolve(&cfg.inner, n)
    } else {
        excitation::evolve_closed_form(&cfg.inner, n)
    };
    state.map(|s| s.amplitudes().to_vec()).map_err(py_err)
}

/// `(gamma1, gamma2, gamma3, norm_factor, outcome_probability)` for
/// measuring the first `len(angles)` ancillas.
#[pyfunction]
fn gamma_coefficients(
    cfg: &PyCouplingConfig,
    angles: Vec<(f64, f64)>,
) -> PyResult<(Complex64, Complex64, Complex64, f64, f64)> {
    let n = angles.len();
    let gt = measurement::gamma_coefficients(&cfg.inner, &MeasurementBasis::new(angles), n)
        .map_err(py_err)?;
    Ok((
        gt.gamma1,
        gt.gamma2,
        gt.gamma3,
        gt.norm_factor,
        gt.outcome_probability,
    ))
}

/// `(V, P, C, closure_residual)` after measuring the ancillas at `angles`.
#[pyfunction]
fn complementarity_after(
    cfg: &PyCouplingConfig,
    angles: Vec<(f64, f64)>,
) -> PyResult<(f64, f64, f64, f64)> {
    let n = angles.len();
    let gt = measurement::gamma_coefficients(&cfg.inner, &MeasurementBasis::new(angles), n)
        .map_err(py_err)?;
    Ok(triple_tuple(measurement::complementarity_after(&gt)))
}

/// `(V, P, C, closure_residual)` of a pure two-qubit state.
#[pyfunction]
#[pyo3(name = "complementarity")]
fn state_complementarity(
    c00: Complex64,
    c01: Complex64,
    c10: Complex64,
    c11: Complex64,
) -> PyResult<(f64, f64, f64, f64)> {
    let s = TwoQubitPure::new(c00, c01, c10, c11).map_err(py_err)?;
    Ok(triple_tuple(triple(&s)))
}

/// Maximizes `objective` over the bases of the first `n` ancillas.
#[pyfunction]
#[pyo3(signature = (cfg, n, objective, restarts = 16, max_evals = 200_000, tol = 1e-9, seed = 0, greedy = false))]
#[allow(clippy::too_many_arguments)]
fn maximize(
    py: Python<'_>,
    cfg: &PyCouplingConfig,
    n: usize,
    objective: &str,
    restarts: usize,
    max_evals: usize,
    tol: f64,
    seed: u64,
    greedy: bool,
) -> PyResult<PyOptimizationResult> {
    let objective: Objective = objective
        .parse()
        .map_err(|e: String| PyValueError::new_err(e))?;
    let budget = OptimizerBudget {
        restarts,
        max_evals,
        tol,
        seed,
        mode: if greedy {
            SearchMode::Greedy
        } else {
            SearchMode::Joint
        },
        ..OptimizerBudget::default()
    };
    let inner = cfg.inner;
    let r = py
        .detach(|| optimizer::maximize(&inner, n, objective, &budget))
        .map_err(py_err)?;
    let s = r.state(&inner).map_err(py_err)?;
    Ok(PyOptimizationResult {
        objective: objective.as_str().to_string(),
        n: r.n,
        angles: r.basis.angles().to_vec(),
        visibility: r.achieved.visibility,
        predictability: r.achieved.predictability,
        concurrence: r.achieved.concurrence,
        closure_residual: r.achieved.closure_residual,
        outcome_probability: r.outcome_probability,
        evaluations: r.evaluations,
        converged: r.converged,
        seed: r.seed,
        restart: r.restart,
        state: (s.c00, s.c01, s.c10),
    })
}

/// `(i, D_qA_qi, D_qA_qB)` for every ancilla.
#[pyfunction]
fn distinguishability_profile(cfg: &PyCouplingConfig) -> PyResult<Vec<(usize, f64, f64)>> {
    experiments::run_distinguishability_profile(&cfg.inner)
        .map(|rows| {
            rows.into_iter()
                .map(|r| (r.i, r.d_qa_qi, r.d_qa_qb))
                .collect()
        })
        .map_err(py_err)
}

#[pyfunction]
fn reservoir_limit_concurrence(k: f64, t: f64) -> f64 {
    excitation::reservoir_limit_concurrence(k, t)
}

#[pyfunction]
fn continuous_limit_gap(k: f64, total_time: f64, n: usize) -> PyResult<f64> {
    excitation::continuous_limit_gap(k, total_time, n).map_err(py_err)
}

#[pymodule]
pub fn complement_opt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCouplingConfig>()?;
    m.add_class::<PyOptimizationResult>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(complementarity_after, m)?)?;
    m.add_function(wrap_pyfunction!(state_complementarity, m)?)?;
    m.add_function(wrap_pyfunction!(maximize, m)?)?;
    m.add_function(wrap_pyfunction!(distinguishability_profile, m)?)?;
    m.add_function(wrap_pyfunction!(reservoir_limit_concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(continuous_limit_gap, m)?)?;
    Ok(())
}
