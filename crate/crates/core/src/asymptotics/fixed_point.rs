//! Large-system limit of the normalized SIR.
//!
//! With `x0 = (pi rho_p / c)^{alpha/2}` the smallest scaled received power of
//! an active node, the limit `beta` solves
//!
//! ```text
//! (2 pi^2 rho beta^{2/alpha} / alpha) csc(2 pi / alpha)
//!     = 1 + 2 pi rho beta x0^{1-2/alpha} / ((alpha - 2) (1 + beta x0)^{1-2/alpha})
//!         * 2F1(1-2/alpha, 1-2/alpha; 2-2/alpha; beta x0 / (1 + beta x0))
//! ```
//!
//! which is the closed form of `1 = beta c int tau dH(tau) / (1 + tau beta)`
//! for the limiting distribution `H` of the scaled received powers.
//! [`fixed_point_oracle`] evaluates that integral by quadrature without
//! touching the hypergeometric code path.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use super::special::gauss_2f1;
use crate::error::{Error, Result};

const MAX_BRACKET_EXPANSIONS: usize = 60;

/// Inputs of the asymptotic analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticParams {
    /// Density of potential interferers.
    pub rho_p: f64,
    /// Limiting fraction of potential interferers that are active.
    pub nu: f64,
    /// Ratio `n / N`.
    pub c: f64,
    pub alpha: f64,
}

impl AsymptoticParams {
    pub fn new(rho_p: f64, nu: f64, c: f64, alpha: f64) -> Result<Self> {
        let p = Self { rho_p, nu, c, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return bad(format!("alpha must be > 2, got {}", self.alpha));
        }
        if !(self.rho_p.is_finite() && self.rho_p > 0.0) {
            return bad(format!("rho_p must be > 0, got {}", self.rho_p));
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return bad(format!("nu must lie in (0, 1], got {}", self.nu));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return bad(format!("c must be > 0, got {}", self.c));
        }
        Ok(())
    }

    /// Limiting density of active interferers.
    pub fn rho(&self) -> f64 {
        self.nu * self.rho_p
    }

    /// Mean number of active interferers per branch; must exceed 1.
    pub fn load(&self) -> f64 {
        self.c * self.nu
    }

    /// Lower edge of the support of the scaled received powers.
    pub fn support_edge(&self) -> f64 {
        (PI * self.rho_p / self.c).powf(self.alpha / 2.0)
    }

    fn no_bracket(&self) -> Error {
        Error::NoBracket { rho: self.rho(), c: self.c, alpha: self.alpha, nu: self.nu }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedPoint,
    LargeC,
    QuadratureOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSolution {
    pub beta: f64,
    pub method: Method,
    /// Relative residual of the defining equation (0 for closed forms).
    pub residual: f64,
    pub params: AsymptoticParams,
}

impl AsymptoticSolution {
    /// Predicted rate `log2(1 + N^{alpha/2} r_t^{-alpha} beta)`.
    pub fn rate(&self, n_branches: usize, r_t: f64) -> f64 {
        let a = self.params.alpha;
        let sir = (n_branches as f64).powf(a / 2.0) * r_t.powf(-a) * self.beta;
        sir.ln_1p() / std::f64::consts::LN_2
    }

    pub fn large_c(params: AsymptoticParams) -> Self {
        Self {
            beta: beta_large_c(params.rho(), params.alpha),
            method: Method::LargeC,
            residual: 0.0,
            params,
        }
    }
}

/// `c -> infinity` limit, `[alpha / (2 pi^2 rho) sin(2 pi / alpha)]^{alpha/2}`.
pub fn beta_large_c(rho: f64, alpha: f64) -> f64 {
    (alpha / (2.0 * PI * PI * rho) * (2.0 * PI / alpha).sin()).powf(alpha / 2.0)
}

/// Left and right sides of the fixed-point equation at `beta`.
fn sides(beta: f64, p: &AsymptoticParams) -> Result<(f64, f64)> {
    let a = p.alpha;
    let rho = p.rho();
    let e = 1.0 - 2.0 / a;
    let lhs = 2.0 * PI * PI * rho * beta.powf(2.0 / a) / (a * (2.0 * PI / a).sin());
    let bx = beta * p.support_edge();
    let coeff = 2.0 * PI * rho * beta * p.support_edge().powf(e) / ((a - 2.0) * (1.0 + bx).powf(e));
    let rhs = 1.0 + coeff * gauss_2f1(e, e, 1.0 + e, bx / (1.0 + bx))?;
    Ok((lhs, rhs))
}

/// `F(beta) = LHS - RHS`; negative below the root, positive above it.
pub fn fixed_point_equation(beta: f64, params: &AsymptoticParams) -> Result<f64> {
    let (lhs, rhs) = sides(beta, params)?;
    Ok(lhs - rhs)
}

/// `|LHS - RHS| / LHS` at `beta`.
pub fn relative_residual(beta: f64, params: &AsymptoticParams) -> Result<f64> {
    let (lhs, rhs) = sides(beta, params)?;
    Ok((lhs - rhs).abs() / lhs)
}

/// Bracket `[lo, hi]` with `F(lo) < 0 < F(hi)`, grown geometrically from
/// `[beta_lc / 10, 10 beta_lc]`.
pub fn bracket(params: &AsymptoticParams) -> Result<(f64, f64)> {
    params.validate()?;
    let seed = beta_large_c(params.rho(), params.alpha);
    let (mut lo, mut hi) = (seed / 10.0, seed * 10.0);
    let mut expansions = 0;
    while fixed_point_equation(lo, params)? >= 0.0 {
        lo /= 10.0;
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(params.no_bracket());
        }
    }
    while fixed_point_equation(hi, params)? <= 0.0 {
        hi *= 10.0;
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS || !hi.is_finite() {
            return Err(params.no_bracket());
        }
    }
    Ok((lo, hi))
}

/// Number of sign changes of `F` over `points` log-spaced samples of `[lo, hi]`.
pub fn sign_changes(params: &AsymptoticParams, lo: f64, hi: f64, points: usize) -> Result<usize> {
    let mut prev: Option<bool> = None;
    let mut changes = 0;
    for k in 0..points {
        let t = k as f64 / (points - 1).max(1) as f64;
        let beta = (lo.ln() + t * (hi.ln() - lo.ln())).exp();
        let positive = fixed_point_equation(beta, params)? > 0.0;
        if prev.is_some_and(|p| p != positive) {
            changes += 1;
        }
        prev = Some(positive);
    }
    Ok(changes)
}

/// Solves the closed-form fixed-point equation by safeguarded Newton
/// iteration inside a sign-change bracket.
pub fn solve_beta_fixed_point(params: &AsymptoticParams) -> Result<AsymptoticSolution> {
    let (mut lo, mut hi) = bracket(params)?;
    let seed = beta_large_c(params.rho(), params.alpha);
    let mut beta = if seed > lo && seed < hi { seed } else { (lo * hi).sqrt() };
    for _ in 0..200 {
        let f = fixed_point_equation(beta, params)?;
        if f == 0.0 {
            break;
        }
        if f < 0.0 {
            lo = beta;
        } else {
            hi = beta;
        }
        let h = beta * 1e-7;
        let slope = (fixed_point_equation(beta + h, params)? - f) / h;
        let mut next = beta - f / slope;
        if !(next > lo && next < hi) {
            next = (lo * hi).sqrt();
        }
        let done = (next - beta).abs() <= 4.0 * f64::EPSILON * beta || hi - lo <= 4.0 * f64::EPSILON * hi;
        beta = next;
        if done {
            break;
        }
    }
    Ok(AsymptoticSolution {
        beta,
        method: Method::FixedPoint,
        residual: relative_residual(beta, params)?,
        params: *params,
    })
}

/// `gamma c int tau dH(tau) / (1 + tau gamma)` evaluated by quadrature.
///
/// With `u = tau^{-2/alpha}` the integral becomes
/// `gamma pi rho int_0^{c / (pi rho_p)} du / (u^{alpha/2} + gamma)`.
pub fn oracle_load(gamma: f64, params: &AsymptoticParams) -> Result<f64> {
    let upper = params.c / (PI * params.rho_p);
    let half_alpha = params.alpha / 2.0;
    let knee = gamma.powf(1.0 / half_alpha);
    let mut breaks = vec![0.0];
    for b in [0.5 * knee, knee, 2.0 * knee] {
        if b < upper {
            breaks.push(b);
        }
    }
    breaks.push(upper);
    let integral = integrate(|u| 1.0 / (u.powf(half_alpha) + gamma), &breaks, 0.0, 1e-14, 2000)?;
    Ok(gamma * PI * params.rho() * integral.value)
}

/// Independent solution of the integral fixed point by quadrature and
/// bisection in `ln(gamma)`.
pub fn fixed_point_oracle(params: &AsymptoticParams) -> Result<AsymptoticSolution> {
    params.validate()?;
    if params.load() <= 1.0 {
        return Err(params.no_bracket());
    }
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let mut expansions = 0;
    while oracle_load(lo, params)? >= 1.0 {
        lo /= 2.0;
        expansions += 1;
        if expansions > 4000 {
            return Err(params.no_bracket());
        }
    }
    while oracle_load(hi, params)? < 1.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 4000 || !hi.is_finite() {
            return Err(params.no_bracket());
        }
    }
    while hi / lo - 1.0 > 1e-14 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if oracle_load(mid, params)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma = (lo * hi).sqrt();
    Ok(AsymptoticSolution {
        beta: gamma,
        method: Method::QuadratureOracle,
        residual: (oracle_load(gamma, params)? - 1.0).abs(),
        params: *params,
    })
}
