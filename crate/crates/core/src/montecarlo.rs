//! Seeded, parallel replication of realizations and aggregation against the
//! asymptotic predictions.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::asymptotics::{limiting_density, limiting_edf, predicted_rate, AsymptoticParams};
use crate::error::{Error, Result};
use crate::mmse::{
    draw_fading, edf, edf_grid, interference_covariance, ks_distance, min_eigenvalue, mmse_sir,
    scaled_powers, Link, SirSample,
};
use crate::pointproc::{hex_lattice_band0, realize, ActivationModel, NetworkConfig, Realization};

/// Consecutive singular draws tolerated before a realization is abandoned.
pub const MAX_REDRAWS: u32 = 100;

/// Random stream for replication `rep` of sweep point `point`. Each
/// `(point, rep)` pair gets its own ChaCha stream under the master seed, so
/// the draws do not depend on how work is scheduled.
pub fn stream_rng(master_seed: u64, point: u32, rep: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((u64::from(point) << 32) | u64::from(rep));
    rng
}

/// One pass of the pipeline: positions, activation, fading, covariance and
/// MMSE SIR. Singular covariances trigger a full redraw.
pub fn run_realization(config: &NetworkConfig, rng: &mut ChaCha8Rng) -> Result<SirSample> {
    run_realization_full(config, rng).map(|(sample, _)| sample)
}

/// Like [`run_realization`], also returning the realization that produced the sample.
pub fn run_realization_full(
    config: &NetworkConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(SirSample, Realization)> {
    config.validate()?;
    let link = Link {
        r_t: config.r_t,
        alpha: config.alpha,
        n_branches: config.n_branches,
        tx_power: config.tx_power(),
    };
    for redraws in 0..MAX_REDRAWS {
        let real = realize(config, rng)?;
        let weights = real.received_weights(config.alpha);
        let fading = draw_fading(config.n_branches, weights.len(), rng);
        let cov = interference_covariance(&fading.g, &weights);
        match mmse_sir(&fading.g_t, &cov, &link) {
            Ok(mut sample) => {
                sample.active_count = weights.len();
                sample.redraw_count = redraws;
                return Ok((sample, real));
            }
            Err(Error::SingularCovariance { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RealizationFailed { attempts: MAX_REDRAWS })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatSummary {
    pub mean: f64,
    /// Unbiased standard deviation; `None` for a single value.
    pub std: Option<f64>,
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

impl StatSummary {
    /// Standard error of the mean; zero for a single value.
    pub fn sem(&self) -> f64 {
        self.std.map_or(0.0, |s| s / (self.count as f64).sqrt())
    }
}

pub fn summarize(values: &[f64]) -> Result<StatSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let std = (count > 1).then(|| {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (count - 1) as f64).sqrt()
    });
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(StatSummary { mean, std, count, min, max })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// One network configuration per sweep point.
    pub points: Vec<NetworkConfig>,
    pub replications: usize,
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// Sweep over the number of receive branches with everything else fixed.
    pub fn branch_sweep(base: &NetworkConfig, branches: &[usize], replications: usize, master_seed: u64) -> Self {
        Self {
            points: branches.iter().map(|&n| base.with_branches(n)).collect(),
            replications,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if self.points.is_empty() {
            return Err(Error::InvalidConfig("experiment has no sweep points".into()));
        }
        if self.points.len() > u32::MAX as usize || self.replications > u32::MAX as usize {
            return Err(Error::InvalidConfig("too many points or replications".into()));
        }
        self.points.iter().try_for_each(NetworkConfig::validate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub index: usize,
    pub config: NetworkConfig,
    /// Samples in replication order; empty when the point failed.
    pub samples: Vec<SirSample>,
    pub rate: Option<StatSummary>,
    pub sir: Option<StatSummary>,
    pub beta: Option<StatSummary>,
    pub redraw_total: u64,
    /// Mean active count over `pi R^2`.
    pub empirical_density: Option<f64>,
    pub predicted_density: f64,
    pub asymptote: f64,
    /// `|mean - asymptote| / asymptote`.
    pub rel_gap: Option<f64>,
    pub failure: Option<String>,
}

impl PointReport {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub points: Vec<PointReport>,
    pub master_seed: u64,
    pub replications: usize,
    pub wall_time_secs: f64,
    pub code_version: &'static str,
}

fn aggregate(index: usize, config: &NetworkConfig, outcome: Result<Vec<SirSample>>) -> PointReport {
    let predicted_density = limiting_density(&config.model, config.rho_p);
    let asymptote = predicted_rate(config);
    let mut report = PointReport {
        index,
        config: config.clone(),
        samples: Vec::new(),
        rate: None,
        sir: None,
        beta: None,
        redraw_total: 0,
        empirical_density: None,
        predicted_density,
        asymptote,
        rel_gap: None,
        failure: None,
    };
    let samples = match outcome {
        Ok(s) => s,
        Err(e) => {
            report.failure = Some(e.to_string());
            return report;
        }
    };
    let column = |f: fn(&SirSample) -> f64| -> Vec<f64> { samples.iter().map(f).collect() };
    let rate = summarize(&column(|s| s.rate)).ok();
    report.sir = summarize(&column(|s| s.sir)).ok();
    report.beta = summarize(&column(|s| s.beta_n)).ok();
    report.redraw_total = samples.iter().map(|s| u64::from(s.redraw_count)).sum();
    let area = PI * config.radius().powi(2);
    report.empirical_density = summarize(&column(|s| s.active_count as f64)).ok().map(|a| a.mean / area);
    report.rel_gap = rate
        .filter(|_| asymptote.is_finite() && asymptote > 0.0)
        .map(|r| (r.mean - asymptote).abs() / asymptote);
    report.rate = rate;
    report.samples = samples;
    report
}

/// Runs every replication of every point on the current rayon pool. Output
/// does not depend on the number of worker threads.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_experiment_with_progress(spec, |_, _| {})
}

/// [`run_experiment`] with a callback invoked after each finished point with
/// `(points done, total points)`.
pub fn run_experiment_with_progress(
    spec: &ExperimentSpec,
    progress: impl Fn(usize, usize),
) -> Result<ExperimentReport> {
    spec.validate()?;
    let start = Instant::now();
    let total = spec.points.len();
    let mut points = Vec::with_capacity(total);
    for (index, config) in spec.points.iter().enumerate() {
        let outcome: Result<Vec<SirSample>> = (0..spec.replications)
            .into_par_iter()
            .map(|rep| {
                let mut rng = stream_rng(spec.master_seed, index as u32, rep as u32);
                run_realization(config, &mut rng)
            })
            .collect();
        points.push(aggregate(index, config, outcome));
        progress(index + 1, total);
    }
    Ok(ExperimentReport {
        points,
        master_seed: spec.master_seed,
        replications: spec.replications,
        wall_time_secs: start.elapsed().as_secs_f64(),
        code_version: env!("CARGO_PKG_VERSION"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub empirical: f64,
    pub predicted: f64,
    /// Standard error of `empirical`: the larger of the binomial value and
    /// the spread across seeds.
    pub sigma: f64,
    pub binomial_sigma: f64,
    pub seed_sem: f64,
    pub seeds: usize,
    /// Radius of the counting window.
    pub window: f64,
}

impl DensityEstimate {
    /// `(empirical - predicted) / sigma`.
    pub fn z_score(&self) -> f64 {
        (self.empirical - self.predicted) / self.sigma
    }

    pub fn within(&self, k_sigma: f64) -> bool {
        self.z_score().abs() <= k_sigma
    }

    pub fn rel_error(&self) -> f64 {
        (self.empirical - self.predicted) / self.predicted
    }
}

/// Active density counted inside the disk of radius `R - margin`, averaged
/// over `seeds` realizations. `margin = 0` counts the whole network. For the
/// cellular model the window is the union of cells whose base station lies
/// inside the disk.
pub fn density_estimate(config: &NetworkConfig, seeds: usize, master_seed: u64, margin: f64) -> Result<DensityEstimate> {
    config.validate()?;
    if seeds == 0 {
        return Err(Error::InvalidConfig("density estimate needs at least one seed".into()));
    }
    let window = config.radius() - margin;
    if window.is_nan() || window <= 0.0 || margin < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "margin {margin} must lie in [0, R) with R = {}",
            config.radius()
        )));
    }
    // cellular counts whole cells: a mobile is inside when its base station is
    let lattice = match config.model {
        ActivationModel::Cellular { rho_c, kappa, .. } => Some(hex_lattice_band0(rho_c, kappa, window)?),
        _ => None,
    };
    let area = match &lattice {
        Some(bs) => bs.sites.len() as f64 / bs.rho_c,
        None => PI * window * window,
    };
    let densities: Vec<f64> = (0..seeds)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(master_seed, 0, rep as u32);
            let real = realize(config, &mut rng)?;
            let inside = |i: &usize| match &lattice {
                Some(bs) => {
                    let (site, _) = bs.lattice.nearest_site(&real.positions[*i]);
                    bs.lattice.site_position(site).norm() <= window
                }
                None => real.positions[*i].norm() < window,
            };
            Ok(real.active_indices().filter(inside).count() as f64 / area)
        })
        .collect::<Result<_>>()?;
    let stats = summarize(&densities)?;
    let predicted = limiting_density(&config.model, config.rho_p);
    let nu = predicted / config.rho_p;
    let expected_nodes = config.rho_p * area * seeds as f64;
    let binomial_sigma = config.rho_p * (nu * (1.0 - nu) / expected_nodes).sqrt();
    let seed_sem = stats.sem();
    Ok(DensityEstimate {
        empirical: stats.mean,
        predicted,
        sigma: binomial_sigma.max(seed_sem),
        binomial_sigma,
        seed_sem,
        seeds,
        window,
    })
}

/// Kolmogorov distance between the e.d.f. of the scaled received powers of
/// one realization and their limiting distribution.
pub fn edf_ks_distance(config: &NetworkConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    let real = realize(config, rng)?;
    let powers = scaled_powers(&real, config.n_branches, config.alpha);
    let params = AsymptoticParams::for_config(config);
    let grid = edf_grid(params.support_edge());
    Ok(ks_distance(&edf(&powers)?, |x| limiting_edf(x, &params), &grid))
}

/// Sample estimate of `(1/n^2) sum_{i,j} [P(p_i <= x, p_j <= x) - P(p_i <= x) P(p_j <= x)]`,
/// which equals the variance of the e.d.f. at `x` across realizations.
/// `x` is the median of the pooled scaled powers. Returns `(x, statistic)`.
pub fn aip_statistic(config: &NetworkConfig, seeds: usize, master_seed: u64) -> Result<(f64, f64)> {
    config.validate()?;
    if seeds < 2 {
        return Err(Error::InvalidConfig("AIP statistic needs at least two seeds".into()));
    }
    let powers: Vec<Vec<f64>> = (0..seeds)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(master_seed, 0, rep as u32);
            let real = realize(config, &mut rng)?;
            Ok(scaled_powers(&real, config.n_branches, config.alpha))
        })
        .collect::<Result<_>>()?;
    let pooled: Vec<f64> = powers.iter().flatten().copied().collect();
    let x = edf(&pooled)?.median();
    let at_x: Vec<f64> = powers
        .iter()
        .map(|p| p.iter().filter(|&&v| v <= x).count() as f64 / p.len() as f64)
        .collect();
    let var = summarize(&at_x)?.std.unwrap_or(0.0).powi(2);
    Ok((x, var))
}

/// `lambda_min((1/N) S Psi S^H)` for one realization: the interference
/// covariance built from the scaled powers `p_in`.
pub fn normalized_min_eigenvalue(config: &NetworkConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    let real = realize(config, rng)?;
    let n = config.n_branches as f64;
    let weights: Vec<f64> = real
        .received_weights(config.alpha)
        .iter()
        .map(|w| w * n.powf(config.alpha / 2.0) / n)
        .collect();
    let fading = draw_fading(config.n_branches, weights.len(), rng);
    let cov: DMatrix<Complex64> = interference_covariance(&fading.g, &weights);
    min_eigenvalue(&cov)
}

/// Lower bound `(pi rho_p / c)^{alpha/2} (c nu / 2 delta) (1 - sqrt(delta / (c nu)))^2`
/// on the normalized minimum eigenvalue, valid for `1 < delta < c nu`.
pub fn min_eigenvalue_bound(params: &AsymptoticParams, delta: f64) -> Result<f64> {
    let load = params.load();
    if !(delta > 1.0 && delta < load) {
        return Err(Error::Domain(format!("delta = {delta} must lie in (1, c nu = {load})")));
    }
    Ok(params.support_edge() * load / (2.0 * delta) * (1.0 - (delta / load).sqrt()).powi(2))
}
