//! Gauss hypergeometric function on real arguments `z <= 1` and the
//! principal branch of the Lambert W function.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

const SERIES_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 1_000_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Plain power series, for `|z| < 1`. Truncates once the remaining geometric
/// tail is below `SERIES_TOL` of the partial sum.
fn power_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let tail = 1.0 / (1.0 - z.abs());
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for k in 0..MAX_TERMS {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() * tail <= SERIES_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!(
        "2F1({a}, {b}; {c}; {z}) series exceeded {MAX_TERMS} terms"
    )))
}

/// `2F1(a, b; c; z)` for real parameters and `z <= 1`.
///
/// `|z| <= 1/2` sums the series directly, `z < -1/2` goes through the Pfaff
/// transformation, `1/2 < z < 1` uses the linear transformation to `1 - z`,
/// and `z = 1` the Gauss summation formula (requires `c - a - b > 0`).
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if [a, b, c, z].iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("2F1 arguments must be finite: ({a}, {b}; {c}; {z})")));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1 parameter c = {c} is a nonpositive integer")));
    }
    if z > 1.0 {
        return Err(Error::Domain(format!("2F1 argument z = {z} exceeds 1")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let s = c - a - b;
    if z == 1.0 {
        if s <= 0.0 {
            return Err(Error::Divergent { a, b, c, z });
        }
        return Ok(gamma(c) * gamma(s) * recip_gamma(c - a) * recip_gamma(c - b));
    }
    if z < -0.5 {
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * gauss_2f1(a, c - b, c, w)?);
    }
    if z <= 0.5 || (s - s.round()).abs() < 1e-9 {
        return power_series(a, b, c, z);
    }
    let w = 1.0 - z;
    let first = gamma(c) * gamma(s) * recip_gamma(c - a) * recip_gamma(c - b);
    let second = gamma(c) * gamma(-s) * recip_gamma(a) * recip_gamma(b);
    let mut value = 0.0;
    if first != 0.0 {
        value += first * power_series(a, b, 1.0 - s, w)?;
    }
    if second != 0.0 {
        value += second * w.powf(s) * power_series(c - a, c - b, 1.0 + s, w)?;
    }
    Ok(value)
}

/// Principal branch `W_0(z)`, the solution `w >= -1` of `w e^w = z`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp();
    if z.is_nan() || z < branch - 4.0 * f64::EPSILON * branch.abs() {
        return Err(Error::Domain(format!("Lambert W0 requires z >= -1/e, got {z}")));
    }
    if z <= branch {
        return Ok(-1.0);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let mut w = if z < -0.32 {
        // expansion about the branch point
        let p = (2.0 * (std::f64::consts::E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn trivial_values() {
        assert_eq!(gauss_2f1(0.3, 0.7, 1.9, 0.0).unwrap(), 1.0);
        let log_identity = -(0.5f64).ln() / 0.5;
        assert!(rel(gauss_2f1(1.0, 1.0, 2.0, 0.5).unwrap(), log_identity) < 1e-14);
        assert!(rel(gauss_2f1(0.5, 0.5, 1.5, 1.0).unwrap(), std::f64::consts::FRAC_PI_2) < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(gauss_2f1(1.0, 1.0, -2.0, 0.3), Err(Error::Domain(_))));
        assert!(matches!(gauss_2f1(1.0, 1.0, 2.0, 1.0), Err(Error::Divergent { .. })));
        assert!(matches!(gauss_2f1(1.0, 1.0, 2.0, 1.5), Err(Error::Domain(_))));
        assert!(matches!(lambert_w0(-0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn terminating_series() {
        // 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
        let (b, c, z) = (1.5, 2.5, 0.8);
        let expect = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!(rel(gauss_2f1(-2.0, b, c, z).unwrap(), expect) < 1e-14);
    }

    #[test]
    fn lambert_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w0(-(-1.0f64).exp()).unwrap(), -1.0);
        // frozen from a 40-digit reference evaluation
        for (z, w) in [
            (-0.3, -0.489_402_227_180_215),
            (0.5, 0.351_733_711_249_195_83),
            (1.0, 0.567_143_290_409_783_8),
            (10.0, 1.745_528_002_740_699_4),
            (100.0, 3.385_630_140_290_05),
            (1e-8, 9.999_999_900_000_002e-9),
        ] {
            assert!(rel(lambert_w0(z).unwrap(), w) < 1e-13, "W0({z})");
        }
    }
}
