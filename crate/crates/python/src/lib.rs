//! Python module `devbound`. Reports come back as plain dicts with the same
//! layout as the CLI's JSON.

use devbound_core::bounds::{self, Chain};
use devbound_core::classes::{self, GridConfig};
use devbound_core::oracle::{self, FuzzConfig, ValueDistribution};
use devbound_core::regimes::{self, Regime};
use devbound_core::{Error, Tolerances, WeightedSample, Window};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

pyo3::create_exception!(
    devbound,
    DevboundError,
    PyValueError,
    "Invalid input or violated hypothesis."
);

fn err(e: Error) -> PyErr {
    DevboundError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse<T: std::str::FromStr<Err = String>>(text: &str) -> PyResult<T> {
    text.parse().map_err(DevboundError::new_err)
}

#[pyclass(name = "Tolerances", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyTolerances {
    inner: Tolerances,
}

#[pymethods]
impl PyTolerances {
    #[new]
    #[pyo3(signature = (eps_sum=1e-9, eps_rel=1e-9, eps_abs=1e-12))]
    fn new(eps_sum: f64, eps_rel: f64, eps_abs: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Tolerances::new(eps_sum, eps_rel, eps_abs).map_err(err)?,
        })
    }

    #[getter]
    fn eps_sum(&self) -> f64 {
        self.inner.eps_sum
    }

    #[getter]
    fn eps_rel(&self) -> f64 {
        self.inner.eps_ineq_rel
    }

    #[getter]
    fn eps_abs(&self) -> f64 {
        self.inner.eps_ineq_abs
    }

    fn __repr__(&self) -> String {
        format!(
            "Tolerances(eps_sum={}, eps_rel={}, eps_abs={})",
            self.inner.eps_sum, self.inner.eps_ineq_rel, self.inner.eps_ineq_abs
        )
    }
}

fn tol(t: Option<PyTolerances>) -> Tolerances {
    t.map(|t| t.inner).unwrap_or_default()
}

/// Values with weights summing to one. Omitted weights mean `1/n` each.
#[pyclass(name = "WeightedSample", frozen)]
struct PySample {
    inner: WeightedSample,
}

#[pymethods]
impl PySample {
    #[new]
    #[pyo3(signature = (values, weights=None, eps_sum=1e-9))]
    fn new(values: Vec<f64>, weights: Option<Vec<f64>>, eps_sum: f64) -> PyResult<Self> {
        let inner = match weights {
            Some(w) => WeightedSample::with_tolerance(values, w, eps_sum),
            None => WeightedSample::equal_weights(values),
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.inner.weighted_mean()
    }

    /// Detected regime: "equal", "simplex", "steffensen" or None.
    fn regime(&self) -> Option<&'static str> {
        regimes::detect_regime(self.inner.weights(), &Tolerances::default()).map(|r| r.as_str())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "WeightedSample(n={}, mean={})",
            self.inner.len(),
            self.inner.weighted_mean()
        )
    }
}

/// `(max |x_k − x̄|, k)` with a 1-based index.
#[pyfunction]
fn exact_max_deviation(sample: PyRef<'_, PySample>) -> (f64, usize) {
    oracle::exact_max_deviation(&sample.inner)
}

#[pyfunction]
#[pyo3(signature = (sample, tolerances=None))]
fn samuelson_bound<'py>(
    py: Python<'py>,
    sample: PyRef<'_, PySample>,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &bounds::samuelson_bound(&sample.inner, &tol(tolerances)).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (sample, p=2.0, tolerances=None))]
fn weighted_power_bound<'py>(
    py: Python<'py>,
    sample: PyRef<'_, PySample>,
    p: f64,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &bounds::weighted_power_bound(&sample.inner, p, &tol(tolerances)).map_err(err)?,
    )
}

/// Moment and gap forms for `function` with modulus `m·x^p`.
#[pyfunction]
#[pyo3(signature = (sample, function, m, p, tolerances=None))]
fn uniform_convex_gap_bound<'py>(
    py: Python<'py>,
    sample: PyRef<'_, PySample>,
    function: &str,
    m: f64,
    p: f64,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    let f = classes::function_from_name(function).map_err(err)?.function;
    to_py(
        py,
        &bounds::uniform_convex_gap_bound(&sample.inner, &f, m, p, &tol(tolerances))
            .map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (sample, function, modulus, tolerances=None))]
fn modulus_gap_bound<'py>(
    py: Python<'py>,
    sample: PyRef<'_, PySample>,
    function: &str,
    modulus: &str,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    let f = classes::function_from_name(function).map_err(err)?.function;
    let phi = classes::modulus_from_name(modulus).map_err(err)?;
    to_py(
        py,
        &bounds::modulus_gap_bound(&sample.inner, &f, &phi, &tol(tolerances)).map_err(err)?,
    )
}

/// Bound on `|x_{k,j} − x̄|`; `k` and `j` are 1-based and inclusive.
#[pyfunction]
#[pyo3(signature = (sample, k, j, r=1.0, chain="raw_moment", function=None, tolerances=None))]
#[allow(clippy::too_many_arguments)]
fn window_bound<'py>(
    py: Python<'py>,
    sample: PyRef<'_, PySample>,
    k: usize,
    j: usize,
    r: f64,
    chain: &str,
    function: Option<&str>,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    let chain: Chain = parse(chain)?;
    let f = function
        .map(|name| classes::function_from_name(name).map(|r| r.function))
        .transpose()
        .map_err(err)?;
    let w = Window::new(k, j, sample.inner.len()).map_err(err)?;
    to_py(
        py,
        &bounds::window_bound(&sample.inner, w, r, chain, f.as_ref(), &tol(tolerances))
            .map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (sample, k, r=1.0, tolerances=None))]
fn prefix_split_bound<'py>(
    py: Python<'py>,
    sample: PyRef<'_, PySample>,
    k: usize,
    r: f64,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &bounds::js_prefix_bound(&sample.inner, k, r, &tol(tolerances)).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (sample, r=1.0, tolerances=None))]
fn prefix_means_profile<'py>(
    py: Python<'py>,
    sample: PyRef<'_, PySample>,
    r: f64,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &bounds::prefix_means_profile(&sample.inner, r, &tol(tolerances)).map_err(err)?,
    )
}

#[derive(Serialize)]
struct WeightsSummary {
    regime: Option<Regime>,
    equal: bool,
    positive_simplex: bool,
    steffensen: bool,
    admissible_k: Vec<usize>,
    prefix_sums: Vec<f64>,
}

/// Regime flags and admissible split indices for a weight vector.
#[pyfunction]
#[pyo3(signature = (weights, tolerances=None))]
fn check_weights<'py>(
    py: Python<'py>,
    weights: Vec<f64>,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    let t = tol(tolerances);
    let report = regimes::validate_steffensen(&weights, &t);
    to_py(
        py,
        &WeightsSummary {
            regime: regimes::detect_regime(&weights, &t),
            equal: regimes::is_equal_weights(&weights, &t),
            positive_simplex: report.is_positive_simplex,
            steffensen: report.is_steffensen,
            admissible_k: regimes::admissible_ks(&weights, &t),
            prefix_sums: report.prefix_sums,
        },
    )
}

#[pyfunction]
#[pyo3(signature = (sample, r_set=vec![1.0, 2.0], tolerances=None))]
fn verify_dataset<'py>(
    py: Python<'py>,
    sample: PyRef<'_, PySample>,
    r_set: Vec<f64>,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &oracle::verify_dataset(&sample.inner, &r_set, &tol(tolerances)).map_err(err)?,
    )
}

/// Seeded tightness search; runs without holding the GIL.
#[pyfunction]
#[pyo3(signature = (seed=0, trials=100, regime="simplex", n_min=2, n_max=12, r_set=vec![1.0, 2.0], distribution="uniform", steps=20, tolerances=None))]
#[allow(clippy::too_many_arguments)]
fn fuzz_tightness<'py>(
    py: Python<'py>,
    seed: u64,
    trials: usize,
    regime: &str,
    n_min: usize,
    n_max: usize,
    r_set: Vec<f64>,
    distribution: &str,
    steps: usize,
    tolerances: Option<PyTolerances>,
) -> PyResult<Bound<'py, PyAny>> {
    let config = FuzzConfig {
        master_seed: seed,
        trials,
        n_range: (n_min, n_max),
        r_set,
        regime: parse::<Regime>(regime)?,
        value_distribution: parse::<ValueDistribution>(distribution)?,
        hill_climb_steps: steps,
        tolerances: tol(tolerances),
    };
    let report = py.detach(|| oracle::fuzz_tightness(&config)).map_err(err)?;
    to_py(py, &report)
}

/// Grid check of `x ↦ name` for superquadraticity.
#[pyfunction]
#[pyo3(signature = (name, grid=64, span=10.0))]
fn check_superquadratic<'py>(
    py: Python<'py>,
    name: &str,
    grid: usize,
    span: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let f = classes::function_from_name(name).map_err(err)?.function;
    let cfg = GridConfig {
        grid_size: grid,
        span,
        ..GridConfig::default()
    };
    to_py(py, &classes::check_superquadratic(&f, &cfg).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (name, modulus, grid=64, span=10.0))]
fn check_uniform_convexity<'py>(
    py: Python<'py>,
    name: &str,
    modulus: &str,
    grid: usize,
    span: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let f = classes::function_from_name(name).map_err(err)?.function;
    let phi = classes::modulus_from_name(modulus).map_err(err)?;
    let cfg = GridConfig {
        grid_size: grid,
        span,
        ..GridConfig::default()
    };
    to_py(
        py,
        &classes::check_uniform_convexity(&f, &phi, &cfg).map_err(err)?,
    )
}

#[pymodule]
#[pyo3(name = "devbound")]
fn devbound_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DevboundError", m.py().get_type::<DevboundError>())?;
    m.add_class::<PyTolerances>()?;
    m.add_class::<PySample>()?;
    m.add_function(wrap_pyfunction!(exact_max_deviation, m)?)?;
    m.add_function(wrap_pyfunction!(samuelson_bound, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_power_bound, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_convex_gap_bound, m)?)?;
    m.add_function(wrap_pyfunction!(modulus_gap_bound, m)?)?;
    m.add_function(wrap_pyfunction!(window_bound, m)?)?;
    m.add_function(wrap_pyfunction!(prefix_split_bound, m)?)?;
    m.add_function(wrap_pyfunction!(prefix_means_profile, m)?)?;
    m.add_function(wrap_pyfunction!(check_weights, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz_tightness, m)?)?;
    m.add_function(wrap_pyfunction!(check_superquadratic, m)?)?;
    m.add_function(wrap_pyfunction!(check_uniform_convexity, m)?)?;
    Ok(())
}
