//! Python bindings for the random-covering library.
//!
//! Exposes the arc-set algebra, radius families, dimension-bound
//! formulas, and the Monte Carlo experiments. Structured reports
//! (classifications, experiment tables) are returned as JSON strings so
//! the Python side can `json.loads` them without a conversion layer.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use unicover_core::bounds;
use unicover_core::bounds::GeometricSchedule;
use unicover_core::estimate::{cover_growth_experiment, frostman_suite, riesz_experiment};
use unicover_core::radius::RadiusFamily;
use unicover_core::simulate::{
    countability_experiment, coverage_experiment, measure_experiment, SamplePath,
};
use unicover_core::torus;

fn err(e: unicover_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_family(spec: &str) -> PyResult<RadiusFamily> {
    spec.parse::<RadiusFamily>().map_err(err)
}

fn bound_point_dict<'py>(py: Python<'py>, bp: &bounds::BoundPoint) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("c", bp.c)?;
    d.set_item("value", bp.value)?;
    d.set_item("theta", if bp.theta.is_nan() { None } else { Some(bp.theta) })?;
    d.set_item("valid", bp.valid)?;
    d.set_item("clamped", bp.clamped)?;
    Ok(d)
}

/// A normalized finite union of closed arcs on the circle R/Z.
#[pyclass(name = "ArcSet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyArcSet {
    inner: torus::ArcSet,
}

#[pymethods]
impl PyArcSet {
    /// Builds from `[(start, length), ...]`; arcs are normalized and
    /// merged.
    #[new]
    fn new(raw: Vec<(f64, f64)>) -> Self {
        PyArcSet { inner: torus::ArcSet::from_raw_arcs(raw) }
    }

    #[staticmethod]
    fn empty() -> Self {
        PyArcSet { inner: torus::ArcSet::empty() }
    }

    #[staticmethod]
    fn full_circle() -> Self {
        PyArcSet { inner: torus::ArcSet::full_circle() }
    }

    /// The closed ball B(center, r) as an arc set.
    #[staticmethod]
    fn ball(center: f64, r: f64) -> PyResult<Self> {
        Ok(PyArcSet { inner: torus::ArcSet::ball(center, r).map_err(err)? })
    }

    fn arcs(&self) -> Vec<(f64, f64)> {
        self.inner.arcs().iter().map(|a| (a.start(), a.length())).collect()
    }

    fn arc_count(&self) -> usize {
        self.inner.arc_count()
    }

    fn measure(&self) -> f64 {
        self.inner.measure()
    }

    fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    fn covers_full(&self) -> bool {
        self.inner.covers_full()
    }

    fn contains(&self, x: f64) -> bool {
        self.inner.contains(x)
    }

    fn union(&self, other: &PyArcSet) -> Self {
        PyArcSet { inner: self.inner.union(&other.inner) }
    }

    fn intersect(&self, other: &PyArcSet) -> Self {
        PyArcSet { inner: self.inner.intersect(&other.inner) }
    }

    fn complement(&self) -> Self {
        PyArcSet { inner: self.inner.complement() }
    }

    fn thicken(&self, r: f64) -> Self {
        PyArcSet { inner: self.inner.thicken(r) }
    }

    /// Number of dyadic boxes of side 1/k meeting the set.
    fn box_count(&self, k: usize) -> usize {
        self.inner.box_count(k)
    }

    /// Exact double integral of dist(x, y)^(-s) over the set squared.
    fn riesz_energy(&self, s: f64) -> PyResult<f64> {
        self.inner.riesz_energy(s).map_err(err)
    }

    /// Riesz potential at x of the normalized Lebesgue measure on the
    /// set.
    fn riesz_potential(&self, s: f64, x: f64) -> PyResult<f64> {
        self.inner.riesz_potential(s, x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "ArcSet(arcs={}, measure={:.6})",
            self.inner.arc_count(),
            self.inner.measure()
        )
    }
}

/// A closed-form radius family r_n, parsed from a spec string such as
/// "logn:c=3" or "pow:c=1,alpha=2.5".
#[pyclass(name = "Family", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFamily {
    inner: RadiusFamily,
}

#[pymethods]
impl PyFamily {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(PyFamily { inner: parse_family(spec)? })
    }

    fn r(&self, n: u64) -> PyResult<f64> {
        self.inner.r(n).map_err(err)
    }

    /// Regime classification (covering / full measure / countability)
    /// with series diagnostics, as a JSON string.
    fn classify_json(&self) -> String {
        serde_json::to_string(&self.inner.classify()).unwrap()
    }

    fn __repr__(&self) -> String {
        format!("Family(\"{}\")", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Circle distance between x and y.
#[pyfunction]
fn dist(x: f64, y: f64) -> f64 {
    torus::dist(x, y)
}

/// Lower dimension bound 1 - s(c, theta); invalid below c*(theta).
#[pyfunction]
fn lower_bound<'py>(py: Python<'py>, c: f64, theta: f64) -> PyResult<Bound<'py, PyDict>> {
    bound_point_dict(py, &bounds::lower_bound(c, theta))
}

/// Lower bound optimized over theta.
#[pyfunction]
fn optimize_lower<'py>(py: Python<'py>, c: f64) -> PyResult<Bound<'py, PyDict>> {
    bound_point_dict(py, &bounds::optimize_lower(c))
}

/// Weak upper bound log(1 + 2c(theta^2 - 1)/theta) / log(theta).
#[pyfunction]
fn upper_bound_weak<'py>(py: Python<'py>, c: f64, theta: f64) -> PyResult<Bound<'py, PyDict>> {
    bound_point_dict(py, &bounds::upper_bound_weak(c, theta).map_err(err)?)
}

/// Matrix upper bound log(Lambda) / log(theta).
#[pyfunction]
fn upper_bound_matrix<'py>(py: Python<'py>, c: f64, theta: f64) -> PyResult<Bound<'py, PyDict>> {
    bound_point_dict(py, &bounds::upper_bound_matrix(c, theta).map_err(err)?)
}

#[pyfunction]
fn optimize_upper_weak<'py>(py: Python<'py>, c: f64) -> PyResult<Bound<'py, PyDict>> {
    bound_point_dict(py, &bounds::optimize_upper_weak(c))
}

#[pyfunction]
fn optimize_upper_matrix<'py>(py: Python<'py>, c: f64) -> PyResult<Bound<'py, PyDict>> {
    bound_point_dict(py, &bounds::optimize_upper_matrix(c))
}

/// Envelope exponent s(c, theta).
#[pyfunction]
fn s_exponent(c: f64, theta: f64) -> f64 {
    bounds::s_exponent(c, theta)
}

/// Validity threshold c*(theta) where s = 1.
#[pyfunction]
fn c_star(theta: f64) -> f64 {
    bounds::c_star(theta)
}

/// Dominant eigenvalue Lambda of the 2x2 growth recursion.
#[pyfunction(name = "lambda_")]
fn lambda_(c: f64, theta: f64) -> PyResult<f64> {
    bounds::lambda(c, theta).map_err(err)
}

/// Expected block measure K_{l,m} for the geometric schedule n_j ~
/// theta^j.
#[pyfunction]
fn k_lm(family: &PyFamily, theta: f64, l: u32, m: u32) -> PyResult<f64> {
    let sched = GeometricSchedule::new(theta).map_err(err)?;
    bounds::k_lm(&sched, &family.inner, l, m).map_err(err)
}

/// Shepp upper bound on P(circle not covered by n arcs of length r).
#[pyfunction]
fn shepp_upper(n: u64, r: f64) -> f64 {
    bounds::shepp_upper(n, r)
}

#[pyfunction]
fn shepp_lower(n: u64, r: f64) -> f64 {
    bounds::shepp_lower(n, r)
}

/// The i.i.d. uniform sample path of one trial (deterministic in
/// (master_seed, trial_id)).
#[pyfunction]
fn sample_path(master_seed: u64, trial_id: u64, n: u64) -> Vec<f64> {
    SamplePath::generate(master_seed, trial_id, n).points().to_vec()
}

/// Coverage experiment table entry as a JSON string.
#[pyfunction]
fn coverage_experiment_json(
    family: &PyFamily,
    n: u64,
    trials: u64,
    master_seed: u64,
) -> PyResult<String> {
    let res = coverage_experiment(&family.inner, n, trials, master_seed).map_err(err)?;
    Ok(serde_json::to_string(&res).unwrap())
}

/// Block-measure experiment result as a JSON string.
#[pyfunction]
fn measure_experiment_json(
    family: &PyFamily,
    theta: f64,
    l: u32,
    m: u32,
    trials: u64,
    master_seed: u64,
) -> PyResult<String> {
    let res = measure_experiment(&family.inner, theta, l, m, trials, master_seed).map_err(err)?;
    Ok(serde_json::to_string(&res).unwrap())
}

/// Countability experiment rows as a JSON string.
#[pyfunction]
fn countability_experiment_json(
    family: &PyFamily,
    p: u64,
    checkpoints: Vec<u64>,
    trials: u64,
    master_seed: u64,
) -> PyResult<String> {
    let rows =
        countability_experiment(&family.inner, p, &checkpoints, trials, master_seed).map_err(err)?;
    Ok(serde_json::to_string(&rows).unwrap())
}

/// Cover-growth traces ("simple" or "refined") as a JSON string.
#[pyfunction]
fn cover_growth_json(
    variant: &str,
    c: f64,
    theta: f64,
    l: u32,
    i_max: u32,
    trials: u64,
    master_seed: u64,
) -> PyResult<String> {
    let v = variant.parse().map_err(err)?;
    let traces = cover_growth_experiment(v, c, theta, l, i_max, trials, master_seed).map_err(err)?;
    Ok(serde_json::to_string(&traces).unwrap())
}

/// Riesz-energy experiment report as a JSON string.
#[pyfunction]
fn riesz_experiment_json(
    family: &PyFamily,
    theta: f64,
    l: u32,
    m: u32,
    s: f64,
    trials: u64,
    master_seed: u64,
) -> PyResult<String> {
    let rep =
        riesz_experiment(&family.inner, theta, l, m, s, trials, master_seed).map_err(err)?;
    Ok(serde_json::to_string(&rep).unwrap())
}

/// Frostman-transform reports over random supports as a JSON string.
#[pyfunction]
fn frostman_suite_json(
    s: f64,
    supports: usize,
    probes: usize,
    arcs_per_support: usize,
    master_seed: u64,
) -> PyResult<String> {
    let reps = frostman_suite(s, supports, probes, arcs_per_support, master_seed).map_err(err)?;
    Ok(serde_json::to_string(&reps).unwrap())
}

#[pymodule]
fn unicover(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArcSet>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(dist, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_lower, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_weak, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_upper_weak, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_upper_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(s_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(c_star, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_, m)?)?;
    m.add_function(wrap_pyfunction!(k_lm, m)?)?;
    m.add_function(wrap_pyfunction!(shepp_upper, m)?)?;
    m.add_function(wrap_pyfunction!(shepp_lower, m)?)?;
    m.add_function(wrap_pyfunction!(sample_path, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_experiment_json, m)?)?;
    m.add_function(wrap_pyfunction!(measure_experiment_json, m)?)?;
    m.add_function(wrap_pyfunction!(countability_experiment_json, m)?)?;
    m.add_function(wrap_pyfunction!(cover_growth_json, m)?)?;
    m.add_function(wrap_pyfunction!(riesz_experiment_json, m)?)?;
    m.add_function(wrap_pyfunction!(frostman_suite_json, m)?)?;
    m.add("DEFAULT_MASTER_SEED", unicover_core::rng::DEFAULT_MASTER_SEED)?;
    Ok(())
}
