use std::path::PathBuf;

use netsim::asymptotics::{self, AsymptoticParams};
use netsim::montecarlo::{self, ExperimentSpec};
use netsim::pointproc;
use netsim::{ActivationModel, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_) | Error::UnsupportedReuse { .. } | Error::Domain(_) | Error::Divergent { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn required(name: &str, value: Option<f64>, kind: &str) -> PyResult<f64> {
    value.ok_or_else(|| PyValueError::new_err(format!("model '{kind}' needs `{name}`")))
}

/// Network geometry plus activation model.
#[pyclass(name = "NetworkConfig", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyNetworkConfig {
    inner: netsim::NetworkConfig,
}

#[pymethods]
impl PyNetworkConfig {
    #[new]
    #[pyo3(signature = (rho_p, alpha, n_branches, c, r_t, model = "independent", h = None, rho_c = None, kappa = 3, power_control = false, rho_b = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        rho_p: f64,
        alpha: f64,
        n_branches: usize,
        c: f64,
        r_t: f64,
        model: &str,
        h: Option<f64>,
        rho_c: Option<f64>,
        kappa: u32,
        power_control: bool,
        rho_b: Option<f64>,
    ) -> PyResult<Self> {
        let model = match model {
            "independent" => ActivationModel::Independent,
            "hc1" => ActivationModel::HardCoreI { h: required("h", h, model)? },
            "hc2" => ActivationModel::HardCoreII { h: required("h", h, model)? },
            "cellular" => ActivationModel::Cellular { rho_c: required("rho_c", rho_c, model)?, kappa, power_control },
            "boolean" => ActivationModel::Boolean { rho_b: required("rho_b", rho_b, model)?, h: required("h", h, model)? },
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown model '{other}'; expected independent, hc1, hc2, cellular or boolean"
                )))
            }
        };
        let inner = netsim::NetworkConfig { rho_p, alpha, n_branches, c, r_t, model };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn rho_p(&self) -> f64 {
        self.inner.rho_p
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn n_branches(&self) -> usize {
        self.inner.n_branches
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn r_t(&self) -> f64 {
        self.inner.r_t
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.inner.model.tag()
    }

    #[getter]
    fn model_params(&self) -> String {
        self.inner.model.params_label()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius()
    }

    #[getter]
    fn potential_count(&self) -> usize {
        self.inner.potential_count()
    }

    /// Limiting density of active interferers.
    fn predicted_density(&self) -> f64 {
        asymptotics::limiting_density(&self.inner.model, self.inner.rho_p)
    }

    /// Asymptotic mean rate used as the reference for simulations.
    fn predicted_rate(&self) -> f64 {
        asymptotics::predicted_rate(&self.inner)
    }

    fn with_branches(&self, n_branches: usize) -> Self {
        Self { inner: self.inner.with_branches(n_branches) }
    }

    fn __repr__(&self) -> String {
        format!(
            "NetworkConfig(rho_p={}, alpha={}, n_branches={}, c={}, r_t={}, model='{}', {})",
            self.inner.rho_p,
            self.inner.alpha,
            self.inner.n_branches,
            self.inner.c,
            self.inner.r_t,
            self.inner.model.tag(),
            self.inner.model.params_label()
        )
    }
}

#[pyclass(name = "Realization", frozen)]
pub struct PyRealization {
    inner: pointproc::Realization,
}

#[pymethods]
impl PyRealization {
    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.positions.iter().map(|p| p.x).collect()
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.positions.iter().map(|p| p.y).collect()
    }

    #[getter]
    fn marks(&self) -> Vec<f64> {
        self.inner.marks.clone()
    }

    #[getter]
    fn active(&self) -> Vec<bool> {
        self.inner.active.clone()
    }

    #[getter]
    fn power_weight(&self) -> Vec<f64> {
        self.inner.power_weight.clone()
    }

    #[getter]
    fn serving_distance(&self) -> Option<Vec<f64>> {
        self.inner.serving_distance.clone()
    }

    fn active_count(&self) -> usize {
        self.inner.active_count()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Writes the `x,y,mark,active,power_weight,serving_distance` dump.
    fn write_csv(&self, path: PathBuf) -> PyResult<()> {
        let file = std::fs::File::create(&path).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        self.inner
            .write_csv(std::io::BufWriter::new(file))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

#[pyclass(name = "SirSample", frozen, get_all)]
pub struct PySirSample {
    sir: f64,
    beta_n: f64,
    rate: f64,
    active_count: usize,
    redraw_count: u32,
}

impl From<netsim::SirSample> for PySirSample {
    fn from(s: netsim::SirSample) -> Self {
        Self { sir: s.sir, beta_n: s.beta_n, rate: s.rate, active_count: s.active_count, redraw_count: s.redraw_count }
    }
}

/// Aggregated statistics of one sweep point.
#[pyclass(name = "PointSummary", frozen, get_all)]
pub struct PyPointSummary {
    config: PyNetworkConfig,
    mean_rate: Option<f64>,
    std_rate: Option<f64>,
    sem: Option<f64>,
    mean_sir: Option<f64>,
    asymptote: f64,
    rel_gap: Option<f64>,
    empirical_density: Option<f64>,
    predicted_density: f64,
    redraw_total: u64,
    rates: Vec<f64>,
    failure: Option<String>,
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> PyResult<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| PyValueError::new_err(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Draws one realization of the network.
#[pyfunction]
#[pyo3(signature = (config, seed, replication = 0))]
fn realize(config: &PyNetworkConfig, seed: u64, replication: u32) -> PyResult<PyRealization> {
    let mut rng = montecarlo::stream_rng(seed, 0, replication);
    let inner = pointproc::realize(&config.inner, &mut rng).map_err(to_py)?;
    Ok(PyRealization { inner })
}

/// Full pipeline for one replication: realization, fading and MMSE SIR.
#[pyfunction]
#[pyo3(signature = (config, seed, replication = 0))]
fn run_realization(config: &PyNetworkConfig, seed: u64, replication: u32) -> PyResult<PySirSample> {
    let mut rng = montecarlo::stream_rng(seed, 0, replication);
    montecarlo::run_realization(&config.inner, &mut rng).map(Into::into).map_err(to_py)
}

/// Runs `replications` realizations of every configuration.
#[pyfunction]
#[pyo3(signature = (configs, replications, seed, threads = None))]
fn run_experiment(
    py: Python<'_>,
    configs: Vec<PyNetworkConfig>,
    replications: usize,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<Vec<PyPointSummary>> {
    let spec = ExperimentSpec {
        points: configs.into_iter().map(|c| c.inner).collect(),
        replications,
        master_seed: seed,
    };
    let report = py
        .detach(|| with_pool(threads, || montecarlo::run_experiment(&spec)))?
        .map_err(to_py)?;
    Ok(report
        .points
        .into_iter()
        .map(|p| PyPointSummary {
            mean_rate: p.rate.map(|r| r.mean),
            std_rate: p.rate.and_then(|r| r.std),
            sem: p.rate.filter(|r| r.std.is_some()).map(|r| r.sem()),
            mean_sir: p.sir.map(|s| s.mean),
            asymptote: p.asymptote,
            rel_gap: p.rel_gap,
            empirical_density: p.empirical_density,
            predicted_density: p.predicted_density,
            redraw_total: p.redraw_total,
            rates: p.samples.iter().map(|s| s.rate).collect(),
            failure: p.failure,
            config: PyNetworkConfig { inner: p.config },
        })
        .collect())
}

/// Simulated active density inside `R - margin`: returns
/// `(empirical, predicted, sigma)`.
#[pyfunction]
#[pyo3(signature = (config, seeds, seed, margin = 0.0))]
fn density_estimate(py: Python<'_>, config: &PyNetworkConfig, seeds: usize, seed: u64, margin: f64) -> PyResult<(f64, f64, f64)> {
    let est = py
        .detach(|| montecarlo::density_estimate(&config.inner, seeds, seed, margin))
        .map_err(to_py)?;
    Ok((est.empirical, est.predicted, est.sigma))
}

/// Normalized SIR limit from the closed-form fixed point.
#[pyfunction]
fn solve_beta_fixed_point(rho_p: f64, nu: f64, c: f64, alpha: f64) -> PyResult<f64> {
    let params = AsymptoticParams::new(rho_p, nu, c, alpha).map_err(to_py)?;
    asymptotics::solve_beta_fixed_point(&params).map(|s| s.beta).map_err(to_py)
}

/// Same limit by quadrature of the defining integral equation.
#[pyfunction]
fn fixed_point_oracle(rho_p: f64, nu: f64, c: f64, alpha: f64) -> PyResult<f64> {
    let params = AsymptoticParams::new(rho_p, nu, c, alpha).map_err(to_py)?;
    asymptotics::fixed_point_oracle(&params).map(|s| s.beta).map_err(to_py)
}

#[pyfunction]
fn beta_large_c(rho: f64, alpha: f64) -> f64 {
    asymptotics::beta_large_c(rho, alpha)
}

#[pyfunction]
fn rate_approx(n_branches: usize, rho: f64, alpha: f64, r_t: f64) -> f64 {
    asymptotics::rate_approx(n_branches, rho, alpha, r_t)
}

#[pyfunction]
#[pyo3(signature = (n_branches, kappa, alpha, rho_p, rho_c, power_control = false))]
fn cell_edge_rate(n_branches: usize, kappa: f64, alpha: f64, rho_p: f64, rho_c: f64, power_control: bool) -> f64 {
    asymptotics::cell_edge_rate(n_branches, kappa, alpha, rho_p, rho_c, power_control)
}

#[pyfunction]
fn optimal_reuse(alpha: f64, n_branches: usize, rho_p: f64, rho_c: f64) -> PyResult<f64> {
    asymptotics::optimal_reuse(alpha, n_branches, rho_p, rho_c).map_err(to_py)
}

#[pyfunction]
fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> PyResult<f64> {
    asymptotics::gauss_2f1(a, b, c, z).map_err(to_py)
}

#[pyfunction]
fn lambert_w0(z: f64) -> PyResult<f64> {
    asymptotics::lambert_w0(z).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "netsim")]
fn netsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyNetworkConfig>()?;
    m.add_class::<PyRealization>()?;
    m.add_class::<PySirSample>()?;
    m.add_class::<PyPointSummary>()?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(run_realization, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(density_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_beta_fixed_point, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(beta_large_c, m)?)?;
    m.add_function(wrap_pyfunction!(rate_approx, m)?)?;
    m.add_function(wrap_pyfunction!(cell_edge_rate, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_reuse, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_2f1, m)?)?;
    m.add_function(wrap_pyfunction!(lambert_w0, m)?)?;
    Ok(())
}
