//! Closed-form rate predictions and limiting densities.

use std::f64::consts::PI;

use super::fixed_point::{beta_large_c, AsymptoticParams};
use super::special::lambert_w0;
use crate::error::Result;
use crate::pointproc::{ActivationModel, NetworkConfig};

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Large-N, large-c rate `log2(1 + [N alpha sin(2 pi / alpha) / (2 pi^2 rho r_t^2)]^{alpha/2})`.
pub fn rate_approx(n_branches: usize, rho: f64, alpha: f64, r_t: f64) -> f64 {
    let n = n_branches as f64;
    let base = n * alpha / (2.0 * PI * PI * rho * r_t * r_t) * (2.0 * PI / alpha).sin();
    log2_1p(base.powf(alpha / 2.0))
}

/// Rate of a cell-edge mobile in the hexagonal uplink, with or without
/// path-loss-inverting power control.
pub fn cell_edge_rate(
    n_branches: usize,
    kappa: f64,
    alpha: f64,
    rho_p: f64,
    rho_c: f64,
    power_control: bool,
) -> f64 {
    let coeff = if power_control {
        9.0 * SQRT3 / (5.0 * PI * PI)
    } else {
        3.0 * SQRT3 / (4.0 * PI * PI)
    };
    let occupied = -(-rho_p / rho_c).exp_m1();
    let base = coeff * n_branches as f64 * kappa * alpha / occupied * (2.0 * PI / alpha).sin();
    log2_1p(base.powf(alpha / 2.0))
}

/// Real-valued reuse factor maximizing the reuse-normalized power-controlled
/// cell-edge rate.
pub fn optimal_reuse(alpha: f64, n_branches: usize, rho_p: f64, rho_c: f64) -> Result<f64> {
    let w = lambert_w0(-(alpha / 2.0) * (-alpha / 2.0).exp())?;
    let occupied = -(-rho_p / rho_c).exp_m1();
    let shape = (-(w + alpha) / w).powf(2.0 / alpha);
    Ok(shape * 5.0 * PI * PI * occupied
        / (9.0 * SQRT3 * n_branches as f64 * alpha * (2.0 * PI / alpha).sin()))
}

/// Limiting probability `nu` that a potential interferer is active.
pub fn limiting_activation(model: &ActivationModel, rho_p: f64) -> f64 {
    match *model {
        ActivationModel::Independent => 1.0,
        ActivationModel::HardCoreI { h } => (-rho_p * PI * h * h).exp(),
        ActivationModel::HardCoreII { h } => {
            let x = rho_p * PI * h * h;
            if x == 0.0 {
                1.0
            } else {
                -(-x).exp_m1() / x
            }
        }
        ActivationModel::Cellular { rho_c, kappa, .. } => {
            let ratio = rho_p / rho_c;
            -(-ratio).exp_m1() / ratio / kappa as f64
        }
        ActivationModel::Boolean { rho_b, h } => -(-rho_b * PI * h * h).exp_m1(),
    }
}

/// Limiting density of active interferers, `nu * rho_p`.
pub fn limiting_density(model: &ActivationModel, rho_p: f64) -> f64 {
    limiting_activation(model, rho_p) * rho_p
}

/// Limit of the empirical distribution of the scaled received powers: an
/// atom `1 - nu` at zero and a power-law tail above the support edge.
pub fn limiting_edf(x: f64, params: &AsymptoticParams) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let x0 = params.support_edge();
    if x <= x0 {
        1.0 - params.nu
    } else {
        1.0 - PI * params.rho() / params.c * x.powf(-2.0 / params.alpha)
    }
}

impl AsymptoticParams {
    pub fn for_config(config: &NetworkConfig) -> Self {
        Self {
            rho_p: config.rho_p,
            nu: limiting_activation(&config.model, config.rho_p),
            c: config.c,
            alpha: config.alpha,
        }
    }
}

/// Rate prediction used as the reference line for a simulated configuration:
/// the power-controlled cell-edge formula under cellular power control and
/// the large-c formula with the model's limiting density otherwise.
pub fn predicted_rate(config: &NetworkConfig) -> f64 {
    match config.model {
        ActivationModel::Cellular { rho_c, kappa, power_control: true } => cell_edge_rate(
            config.n_branches,
            kappa as f64,
            config.alpha,
            config.rho_p,
            rho_c,
            true,
        ),
        ref model => rate_approx(
            config.n_branches,
            limiting_density(model, config.rho_p),
            config.alpha,
            config.r_t,
        ),
    }
}

/// `log2(1 + N^{alpha/2} r_t^{-alpha} beta_lc)`; identical to [`rate_approx`].
pub fn rate_from_large_c(n_branches: usize, rho: f64, alpha: f64, r_t: f64) -> f64 {
    let sir = (n_branches as f64).powf(alpha / 2.0) * r_t.powf(-alpha) * beta_large_c(rho, alpha);
    log2_1p(sir)
}
