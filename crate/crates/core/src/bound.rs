//! The tangential-mean upper bound on the CDF of a lognormal sum and its
//! left-tail forms.
//!
//! Since the tangential mean never exceeds the arithmetic mean,
//! `S_N ≤ γ` implies `Π(δ + e^{X_i}) ≤ (γ/N + δ)^N`, so
//!
//! ```text
//! F_S(γ) ≤ F_Z((γ/N + δ)^N),   Z = Π (δ + e^{X_i}).
//! ```
//!
//! The bound tightens as `δ` grows. It is evaluated on the log scale as
//! `P(Σ V_i ≤ N ln1p(γ/(Nδ)))` with `V_i = ln1p(e^{X_i}/δ)`, so that
//! `(γ/N + δ)^N` itself is never formed.

use crate::error::{domain, invalid, Result};
use crate::lognormal::{GaussianParams, SumProblem};
use crate::mellin::inversion::{sum_cdf, sum_density};
use crate::mellin::kernel::LineProblem;
use crate::mellin::{InversionDiagnostics, QuadratureConfig};
use crate::normal::{ln_normal_cdf, normal_cdf};
use rayon::prelude::*;

/// Value of the bound at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub gamma: f64,
    /// Upper bound on `F_S(γ)`.
    pub value: f64,
    /// `1 - value`, computed without cancellation; a lower bound on the CCDF.
    pub complement: f64,
    /// `ln value`, finite in the deep left tail.
    pub ln_value: f64,
    pub delta: f64,
    pub diagnostics: InversionDiagnostics,
}

fn check_bound_problem(p: &SumProblem) -> Result<()> {
    if p.delta() <= 0.0 {
        return Err(invalid(format!(
            "the tangential-mean bound needs delta > 0, got {}",
            p.delta()
        )));
    }
    Ok(())
}

/// Upper bound `F_Z((γ/N + δ)^N)` on `P(S_N ≤ γ)`.
///
/// ```
/// use lognsum::{tm_bound_cdf, gm_bound_cdf, GaussianParams, QuadratureConfig, SumProblem};
/// let g = GaussianParams::new(0.0, 1.0)?;
/// let cfg = QuadratureConfig::default();
/// let loose = tm_bound_cdf(1.0, &SumProblem::uniform(2, g, 10.0)?, &cfg)?;
/// let tight = tm_bound_cdf(1.0, &SumProblem::uniform(2, g, 100.0)?, &cfg)?;
/// assert!(tight.value < loose.value);
/// assert!(loose.value <= gm_bound_cdf(1.0, &[g, g])?);
/// # Ok::<(), lognsum::Error>(())
/// ```
pub fn tm_bound_cdf(gamma: f64, p: &SumProblem, cfg: &QuadratureConfig) -> Result<BoundResult> {
    cfg.validate()?;
    check_bound_problem(p)?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(domain(format!("gamma must be non-negative, got {gamma}")));
    }
    let n = p.n() as f64;
    let c = n * (gamma / (n * p.delta())).ln_1p();
    let v = sum_cdf(&LineProblem::new(p), c, cfg)?;
    Ok(BoundResult {
        gamma,
        value: v.cdf,
        complement: v.ccdf,
        ln_value: v.ln_cdf,
        delta: p.delta(),
        diagnostics: v.diagnostics,
    })
}

/// [`tm_bound_cdf`] over a grid, evaluated in parallel; results are in grid
/// order.
pub fn tm_bound_curve(
    gammas: &[f64],
    p: &SumProblem,
    cfg: &QuadratureConfig,
) -> Vec<Result<BoundResult>> {
    gammas.par_iter().map(|&g| tm_bound_cdf(g, p, cfg)).collect()
}

/// Derivative of the bound with respect to `γ`,
/// `(γ/N + δ)^{N-1} f_Z((γ/N + δ)^N)`. It converges to the density of `S_N`
/// as `δ → ∞`.
pub fn tm_bound_pdf(gamma: f64, p: &SumProblem, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(tm_bound_pdf_grid(&[gamma], p, cfg)?[0])
}

/// [`tm_bound_pdf`] on a grid sharing one line evaluation.
pub fn tm_bound_pdf_grid(gammas: &[f64], p: &SumProblem, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_bound_problem(p)?;
    let n = p.n() as f64;
    let d = p.delta();
    let mut out = vec![0.0; gammas.len()];
    let inside: Vec<usize> = (0..gammas.len()).filter(|&i| gammas[i] > 0.0).collect();
    if inside.is_empty() {
        return Ok(out);
    }
    let cs: Vec<f64> = inside
        .iter()
        .map(|&i| n * (gammas[i] / (n * d)).ln_1p())
        .collect();
    let vals = sum_density(&LineProblem::new(p), &cs, cfg, false)?;
    // f_Z(z) = g(c)/z and (γ/N+δ)^{N-1}/z = 1/(γ/N+δ).
    for (&i, (g, _, _)) in inside.iter().zip(vals) {
        out[i] = g / (gammas[i] / n + d);
    }
    Ok(out)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

fn check_params(params: &[GaussianParams]) -> Result<()> {
    if params.is_empty() {
        return Err(invalid("at least one component is required"));
    }
    Ok(())
}

/// Parameters `(μ̂, σ̂)` of the lognormal that the bound approaches in the
/// left tail: `μ̂ = ln N + Σμ_i/N`, `σ̂² = Σσ_i²/N²`.
pub fn left_tail_params(params: &[GaussianParams]) -> Result<(f64, f64)> {
    check_params(params)?;
    let n = params.len() as f64;
    let mu = n.ln() + params.iter().map(|p| p.mu()).sum::<f64>() / n;
    let var = params.iter().map(|p| p.sigma() * p.sigma()).sum::<f64>() / (n * n);
    Ok((mu, var.sqrt()))
}

/// The geometric-mean bound `P(Π e^{X_i} ≤ (γ/N)^N)`, the `δ → 0` limit of
/// the tangential-mean bound.
pub fn gm_bound_cdf(gamma: f64, params: &[GaussianParams]) -> Result<f64> {
    check_gamma(gamma)?;
    check_params(params)?;
    let n = params.len() as f64;
    let mu: f64 = params.iter().map(|p| p.mu()).sum();
    let sigma = params.iter().map(|p| p.sigma() * p.sigma()).sum::<f64>().sqrt();
    Ok(normal_cdf((n * (gamma / n).ln() - mu) / sigma))
}

/// Lognormal left-tail form `1 - Q((ln γ - μ̂)/σ̂)` of the bound.
///
/// Algebraically this is the same function as [`gm_bound_cdf`]; it is
/// written in the parameterisation of a single lognormal.
pub fn left_tail_cdf(gamma: f64, params: &[GaussianParams]) -> Result<f64> {
    Ok(ln_left_tail_cdf(gamma, params)?.exp())
}

/// Natural logarithm of [`left_tail_cdf`].
pub fn ln_left_tail_cdf(gamma: f64, params: &[GaussianParams]) -> Result<f64> {
    check_gamma(gamma)?;
    let (mu, sigma) = left_tail_params(params)?;
    Ok(ln_normal_cdf((gamma.ln() - mu) / sigma))
}
