//! Large-`N` approximation: `ln((S_N/N + δ))` treated as the mean of `N`
//! i.i.d. terms `ln(δ + e^{X_i})` and hence as normal.

use super::hermite::gauss_hermite_rule;
use crate::error::{invalid, Result};
use crate::lognormal::{check_delta, GaussianParams};
use crate::normal::normal_cdf;

/// Mean and standard deviation of `(1/N) Σ ln(δ + e^{X_i})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltMoments {
    pub mu_tilde: f64,
    pub sigma_tilde: f64,
}

/// `ln(δ + e^y)` without overflow for either term dominating.
fn ln_shifted(y: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        return y;
    }
    let ld = delta.ln();
    if y > ld {
        y + (-(y - ld)).exp().ln_1p()
    } else {
        ld + (y - ld).exp().ln_1p()
    }
}

/// Computes `μ̃ = E[ln(δ + e^X)]` and `σ̃² = Var[ln(δ + e^X)] / N` with an
/// `m_order`-point Gauss–Hermite rule.
///
/// The variance is accumulated in centred form, so it cannot go negative
/// through cancellation.
pub fn clt_moments(
    params: GaussianParams,
    delta: f64,
    n: usize,
    m_order: usize,
) -> Result<CltMoments> {
    check_delta(delta)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let rule = gauss_hermite_rule(m_order)?;
    let (mu, s) = (params.mu(), params.sigma());
    let mu_tilde = rule.expect_normal(mu, s, |y| ln_shifted(y, delta));
    let var = rule.expect_normal(mu, s, |y| {
        let d = ln_shifted(y, delta) - mu_tilde;
        d * d
    });
    Ok(CltMoments {
        mu_tilde,
        sigma_tilde: (var / n as f64).sqrt(),
    })
}

/// `Φ((ln(γ/N + δ) - μ̃)/σ̃)`, the CLT approximation of `P(S_N ≤ γ)`.
pub fn clt_cdf(
    gamma: f64,
    params: GaussianParams,
    delta: f64,
    n: usize,
    m_order: usize,
) -> Result<f64> {
    Ok(normal_cdf(clt_z(gamma, params, delta, n, m_order)?))
}

/// Complement of [`clt_cdf`], evaluated without cancellation.
///
/// ```
/// use lognsum::{approx::clt_ccdf, GaussianParams};
/// let p = GaussianParams::new(0.0, 1.0).unwrap();
/// let v = clt_ccdf(70.0, p, 100.0, 30, 20).unwrap();
/// assert!(v > 0.02 && v < 0.04);
/// ```
pub fn clt_ccdf(
    gamma: f64,
    params: GaussianParams,
    delta: f64,
    n: usize,
    m_order: usize,
) -> Result<f64> {
    Ok(normal_cdf(-clt_z(gamma, params, delta, n, m_order)?))
}

fn clt_z(gamma: f64, params: GaussianParams, delta: f64, n: usize, m_order: usize) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(crate::error::domain(format!(
            "gamma must be non-negative, got {gamma}"
        )));
    }
    let m = clt_moments(params, delta, n, m_order)?;
    let x = ln_shifted((gamma / n as f64).ln(), delta);
    if m.sigma_tilde == 0.0 {
        return Ok(if x >= m.mu_tilde { f64::INFINITY } else { f64::NEG_INFINITY });
    }
    Ok((x - m.mu_tilde) / m.sigma_tilde)
}
