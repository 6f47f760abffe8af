//! Python bindings for the `plp-blindspot` core crate.

use plp_blindspot::simulator::{self, Method, SweepVariable};
use plp_blindspot::{analytic, Error, ObstacleLength};
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::InvalidArgument(m) => PyValueError::new_err(m),
        Error::NumericalFailure(m) => PyArithmeticError::new_err(m),
        Error::Io(e) => PyOSError::new_err(e.to_string()),
    }
}

// `None` or `inf` selects infinite lines.
fn obstacle_length(length: Option<f64>) -> ObstacleLength {
    match length {
        Some(l) if l.is_finite() => ObstacleLength::Finite(l),
        _ => ObstacleLength::Infinite,
    }
}

fn length_to_py(length: ObstacleLength) -> Option<f64> {
    match length {
        ObstacleLength::Infinite => None,
        ObstacleLength::Finite(l) => Some(l),
    }
}

#[pyclass(name = "ScenarioConfig", from_py_object)]
#[derive(Clone)]
struct PyScenarioConfig {
    inner: plp_blindspot::ScenarioConfig,
}

#[pymethods]
impl PyScenarioConfig {
    #[new]
    #[pyo3(signature = (lambda_=0.05, lambda0=0.03, range=20.0, length=None, k_min=3, delta=1e-4, epsilon=0.1,
                        trials=100_000, seed=1, area_draws=1000, area_probes=4096))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        lambda_: f64,
        lambda0: f64,
        range: f64,
        length: Option<f64>,
        k_min: u32,
        delta: f64,
        epsilon: f64,
        trials: u64,
        seed: u64,
        area_draws: u64,
        area_probes: u64,
    ) -> PyResult<Self> {
        let inner = plp_blindspot::ScenarioConfig {
            lambda: lambda_,
            lambda0,
            range,
            length: obstacle_length(length),
            delta,
            epsilon,
            k_min,
            trials,
            seed,
            area_draws,
            area_probes,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: plp_blindspot::ScenarioConfig =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter(lambda_)]
    fn lambda(&self) -> f64 {
        self.inner.lambda
    }
    #[getter]
    fn lambda0(&self) -> f64 {
        self.inner.lambda0
    }
    #[getter]
    fn range(&self) -> f64 {
        self.inner.range
    }
    /// Obstacle length in metres, `None` for infinite lines.
    #[getter]
    fn length(&self) -> Option<f64> {
        length_to_py(self.inner.length)
    }
    #[getter]
    fn k_min(&self) -> u32 {
        self.inner.k_min
    }
    #[getter]
    fn trials(&self) -> u64 {
        self.inner.trials
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "ScenarioConfig(lambda_={}, lambda0={}, range={}, length={}, k_min={}, trials={}, seed={})",
            c.lambda, c.lambda0, c.range, c.length, c.k_min, c.trials, c.seed
        )
    }
}

#[pyclass(name = "EstimateResult", frozen, skip_from_py_object)]
struct PyEstimateResult {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    stderr: f64,
    #[pyo3(get)]
    n_trials: u64,
    #[pyo3(get)]
    master_seed: u64,
}

#[pymethods]
impl PyEstimateResult {
    fn ci95(&self) -> (f64, f64) {
        let half = 1.959_963_984_540_054 * self.stderr;
        (self.value - half, self.value + half)
    }

    fn __repr__(&self) -> String {
        format!(
            "EstimateResult(value={}, stderr={}, n_trials={}, master_seed={})",
            self.value, self.stderr, self.n_trials, self.master_seed
        )
    }
}

impl From<simulator::EstimateResult> for PyEstimateResult {
    fn from(e: simulator::EstimateResult) -> Self {
        Self {
            value: e.value,
            stderr: e.stderr,
            n_trials: e.n_trials,
            master_seed: e.master_seed,
        }
    }
}

#[pyfunction]
#[pyo3(signature = (lambda_, lambda0, k_min=3))]
fn asymptotic_blindspot(lambda_: f64, lambda0: f64, k_min: u32) -> PyResult<f64> {
    analytic::asymptotic_blindspot(lambda_, lambda0, k_min).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (lambda_, area, k_min=3))]
fn conditional_blindspot(lambda_: f64, area: f64, k_min: u32) -> PyResult<f64> {
    analytic::conditional_blindspot(lambda_, area, k_min).map_err(to_py)
}

#[pyfunction]
fn gamma_cell_area_pdf(area: f64, lambda0: f64) -> PyResult<f64> {
    analytic::gamma_cell_area_pdf(area, lambda0).map_err(to_py)
}

#[pyfunction]
fn gamma_cell_area_cdf(area: f64, lambda0: f64) -> PyResult<f64> {
    analytic::gamma_cell_area_cdf(area, lambda0).map_err(to_py)
}

#[pyfunction]
fn visibility_probability(r: f64, lambda0: f64) -> PyResult<f64> {
    analytic::visibility_probability(r, lambda0).map_err(to_py)
}

#[pyfunction]
fn min_lambda0_for_delta(range: f64, delta: f64) -> PyResult<f64> {
    analytic::min_lambda0_for_delta(range, delta).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (lambda_, lambda0, range, k_min=3))]
fn independent_blindspot_lines(lambda_: f64, lambda0: f64, range: f64, k_min: u32) -> PyResult<f64> {
    analytic::independent_blindspot_lines(lambda_, lambda0, range, k_min).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (lambda_, lambda0, length, range, mean_unshadowed_area, k_min=3))]
fn independent_blindspot_segments(
    lambda_: f64,
    lambda0: f64,
    length: f64,
    range: f64,
    mean_unshadowed_area: f64,
    k_min: u32,
) -> PyResult<f64> {
    analytic::independent_blindspot_segments(lambda_, lambda0, length, range, k_min, mean_unshadowed_area)
        .map_err(to_py)
}

/// Returns `(lambda_star, achieved_b_as)`.
#[pyfunction]
#[pyo3(signature = (lambda0, epsilon, k_min=3))]
fn design_anchor_intensity(lambda0: f64, epsilon: f64, k_min: u32) -> PyResult<(f64, f64)> {
    let d = analytic::design_anchor_intensity(lambda0, epsilon, k_min).map_err(to_py)?;
    Ok((d.lambda, d.achieved))
}

#[pyfunction]
#[pyo3(signature = (config, n_trials=None, seed=None))]
fn estimate_blindspot(
    py: Python<'_>,
    config: &PyScenarioConfig,
    n_trials: Option<u64>,
    seed: Option<u64>,
) -> PyResult<PyEstimateResult> {
    let cfg = config.inner.clone();
    let n = n_trials.unwrap_or(cfg.trials);
    let seed = seed.unwrap_or(cfg.seed);
    let est = py
        .detach(|| simulator::estimate_blindspot(&cfg, n, seed))
        .map_err(to_py)?;
    Ok(est.into())
}

/// Returns `(areas, n_discarded)`.
#[pyfunction]
#[pyo3(signature = (lambda0, n_samples, seed=1))]
fn sample_cell_areas(py: Python<'_>, lambda0: f64, n_samples: u64, seed: u64) -> PyResult<(Vec<f64>, u64)> {
    let s = py
        .detach(|| simulator::sample_cell_areas(lambda0, n_samples, seed))
        .map_err(to_py)?;
    Ok((s.areas, s.n_discarded))
}

#[pyfunction]
#[pyo3(signature = (lambda0, length, range, n_draws=1000, n_probes=4096, seed=1))]
fn estimate_mean_unshadowed_area(
    py: Python<'_>,
    lambda0: f64,
    length: Option<f64>,
    range: f64,
    n_draws: u64,
    n_probes: u64,
    seed: u64,
) -> PyResult<PyEstimateResult> {
    let length = obstacle_length(length);
    let est = py
        .detach(|| simulator::estimate_mean_unshadowed_area(lambda0, length, range, n_draws, n_probes, seed))
        .map_err(to_py)?;
    Ok(est.into())
}

/// Runs a parameter sweep and returns one dict per CSV row.
#[pyfunction]
#[pyo3(signature = (config, variable, values, methods=None, n_trials=None, seed=None))]
fn run_sweep<'py>(
    py: Python<'py>,
    config: &PyScenarioConfig,
    variable: &str,
    values: Vec<f64>,
    methods: Option<Vec<String>>,
    n_trials: Option<u64>,
    seed: Option<u64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = config.inner.clone();
    let variable: SweepVariable = variable.parse().map_err(to_py)?;
    let methods: Vec<Method> = methods
        .unwrap_or_else(|| vec!["mc".into(), "analytic_asymptotic".into(), "analytic_independent".into()])
        .iter()
        .map(|m| m.parse())
        .collect::<Result<_, _>>()
        .map_err(to_py)?;
    let n = n_trials.unwrap_or(cfg.trials);
    let seed = seed.unwrap_or(cfg.seed);
    let rows = py
        .detach(|| simulator::run_sweep(&cfg, variable, &values, &methods, n, seed))
        .map_err(to_py)?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("method", r.method)?;
            d.set_item("lambda", r.lambda)?;
            d.set_item("lambda0", r.lambda0)?;
            d.set_item("L", length_to_py(r.length))?;
            d.set_item("R", r.range)?;
            d.set_item("k_min", r.k_min)?;
            d.set_item("value", r.value)?;
            d.set_item("stderr", r.stderr)?;
            d.set_item("n_trials", r.n_trials)?;
            d.set_item("seed", r.seed)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "plp_blindspot")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenarioConfig>()?;
    m.add_class::<PyEstimateResult>()?;
    m.add_function(wrap_pyfunction!(asymptotic_blindspot, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_blindspot, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_cell_area_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_cell_area_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(visibility_probability, m)?)?;
    m.add_function(wrap_pyfunction!(min_lambda0_for_delta, m)?)?;
    m.add_function(wrap_pyfunction!(independent_blindspot_lines, m)?)?;
    m.add_function(wrap_pyfunction!(independent_blindspot_segments, m)?)?;
    m.add_function(wrap_pyfunction!(design_anchor_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_blindspot, m)?)?;
    m.add_function(wrap_pyfunction!(sample_cell_areas, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_mean_unshadowed_area, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
