//! Fading, interference covariance and MMSE output SIR.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Samples whose Cholesky-based condition estimate exceeds this are treated
/// as singular.
pub const CONDITION_CAP: f64 = 1e12;

const HERMITIAN_TOL: f64 = 1e-10;

/// Channel vectors of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSet {
    /// Representative channel, length `N`.
    pub g_t: DVector<Complex64>,
    /// One column per active interferer, `N x count`.
    pub g: DMatrix<Complex64>,
}

/// Circularly symmetric complex Gaussian with unit variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws `g_T` followed by the `count` interferer channels, column by column.
pub fn draw_fading<R: Rng + ?Sized>(n_branches: usize, count: usize, rng: &mut R) -> FadingSet {
    let g_t = DVector::from_fn(n_branches, |_, _| complex_normal(rng));
    let mut g = DMatrix::zeros(n_branches, count);
    for col in 0..count {
        for row in 0..n_branches {
            g[(row, col)] = complex_normal(rng);
        }
    }
    FadingSet { g_t, g }
}

/// `R = sum_i w_i g_i g_i^H` over the columns of `g`.
pub fn interference_covariance(g: &DMatrix<Complex64>, weights: &[f64]) -> DMatrix<Complex64> {
    assert_eq!(g.ncols(), weights.len(), "one weight per interferer");
    let mut scaled = g.clone();
    for (mut col, &w) in scaled.column_iter_mut().zip(weights) {
        col *= Complex64::new(w.sqrt(), 0.0);
    }
    &scaled * scaled.adjoint()
}

/// Geometry of the representative link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub r_t: f64,
    pub alpha: f64,
    pub n_branches: usize,
    /// Transmit power of the representative transmitter.
    pub tx_power: f64,
}

impl Link {
    pub fn unit_power(r_t: f64, alpha: f64, n_branches: usize) -> Self {
        Self { r_t, alpha, n_branches, tx_power: 1.0 }
    }

    /// `N^{-alpha/2} r_t^alpha`, the factor turning SIR into `beta_N`.
    pub fn normalization(&self) -> f64 {
        (self.n_branches as f64).powf(-self.alpha / 2.0) * self.r_t.powf(self.alpha)
    }
}

/// Output of the MMSE receiver for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirSample {
    pub sir: f64,
    pub beta_n: f64,
    /// `log2(1 + sir)`, bits per symbol.
    pub rate: f64,
    pub active_count: usize,
    pub redraw_count: u32,
}

impl SirSample {
    pub fn from_sir(sir: f64, link: &Link, active_count: usize) -> Self {
        Self {
            sir,
            beta_n: link.normalization() * sir,
            rate: sir.ln_1p() / std::f64::consts::LN_2,
            active_count,
            redraw_count: 0,
        }
    }
}

/// SIR at the output of the MMSE combiner,
/// `P_T r_t^{-alpha} g_T^H R^{-1} g_T`, via Cholesky factorization of `R`.
pub fn mmse_sir(g_t: &DVector<Complex64>, cov: &DMatrix<Complex64>, link: &Link) -> Result<SirSample> {
    let n = g_t.len();
    assert_eq!(cov.shape(), (n, n), "covariance must be N x N");
    let chol = nalgebra::Cholesky::new(cov.clone())
        .ok_or(Error::SingularCovariance { condition: f64::INFINITY })?;
    let l = chol.l_dirty();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        let d = l[(i, i)].re;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let condition = (hi / lo).powi(2);
    if lo.is_nan() || lo <= 0.0 || condition.is_nan() || condition > CONDITION_CAP {
        return Err(Error::SingularCovariance { condition });
    }
    // g^H R^{-1} g = |L^{-1} g|^2
    let y = l
        .solve_lower_triangular(g_t)
        .ok_or(Error::SingularCovariance { condition })?;
    let quad = y.norm_squared();
    let sir = link.tx_power * link.r_t.powf(-link.alpha) * quad;
    // active_count is filled in by the realization pipeline
    Ok(SirSample::from_sir(sir, link, 0))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Domain(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    if m.is_empty() {
        return Err(Error::EmptyInput);
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let asymmetry = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if asymmetry > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian { asymmetry });
    }
    let eig = SymmetricEigen::new(m.clone());
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Empirical distribution function of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Edf {
    sorted: Vec<f64>,
}

impl Edf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of the sample `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Empirical median (lower middle element).
    pub fn median(&self) -> f64 {
        self.sorted[(self.sorted.len() - 1) / 2]
    }
}

pub fn edf(values: &[f64]) -> Result<Edf> {
    Edf::new(values)
}

/// `max_x |H_n(x) - H(x)|` over the grid.
pub fn ks_distance(edf: &Edf, reference: impl Fn(f64) -> f64, grid: &[f64]) -> f64 {
    grid.iter().map(|&x| (edf.eval(x) - reference(x)).abs()).fold(0.0, f64::max)
}

/// 512 log-spaced points on `[x0 / 10, 1e3 * x0]`.
pub fn edf_grid(x0: f64) -> Vec<f64> {
    const POINTS: usize = 512;
    let (lo, hi) = ((x0 / 10.0).ln(), (x0 * 1e3).ln());
    (0..POINTS)
        .map(|k| (lo + (hi - lo) * k as f64 / (POINTS - 1) as f64).exp())
        .collect()
}

/// Scaled received powers `p_in = N^{alpha/2} P_i r_i^{-alpha}` of every
/// potential interferer, zeros included for silent ones.
pub fn scaled_powers(real: &crate::pointproc::Realization, n_branches: usize, alpha: f64) -> Vec<f64> {
    let scale = (n_branches as f64).powf(alpha / 2.0);
    real.positions
        .iter()
        .zip(&real.power_weight)
        .map(|(p, &w)| if w > 0.0 { scale * w * p.norm().powf(-alpha) } else { 0.0 })
        .collect()
}
