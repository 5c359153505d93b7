use super::QuadratureConfig;
use crate::error::{Error, Result};
use crate::lognormal::{GaussianParams, SumProblem};
use crate::quad::{integrate, QuadOptions};

fn opts(cfg: &QuadratureConfig) -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-300,
        rel_tol: cfg.adaptive_tol,
        max_intervals: 2000,
    }
}

fn shifted_pdf(g: &GaussianParams, delta: f64, y: f64) -> f64 {
    if y <= delta {
        return 0.0;
    }
    let w = y - delta;
    g.density(w.ln()) / w
}

/// `∫ n_a(u) f_b(x / y) / y du` over `y = δ + e^u ∈ (δ, cap)`.
fn half(
    a: &GaussianParams,
    delta: f64,
    cap: f64,
    cfg: &QuadratureConfig,
    mut inner: impl FnMut(f64) -> f64,
) -> Result<f64> {
    if cap <= delta {
        return Ok(0.0);
    }
    let lo = a.mu() - cfg.support_cut * a.sigma();
    let hi = (cap - delta).ln().min(a.mu() + cfg.support_cut * a.sigma());
    if hi <= lo {
        return Ok(0.0);
    }
    let r = integrate(
        |u: f64| {
            let y = delta + u.exp();
            a.density(u) * inner(y) / y
        },
        lo,
        hi,
        opts(cfg),
    )?;
    Ok(r.value)
}

fn pdf2(x: f64, a: &GaussianParams, b: &GaussianParams, delta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if x <= delta * delta {
        return Ok(0.0);
    }
    // Split the product at y = √x and integrate each half in the log variable
    // of the factor that is near its lower wall there.
    let m = x.sqrt();
    let lower = half(a, delta, m, cfg, |y| shifted_pdf(b, delta, x / y))?;
    let upper = half(b, delta, m, cfg, |y| shifted_pdf(a, delta, x / y))?;
    Ok(lower + upper)
}

/// Density of `Z = Π Y_i` by repeated Mellin convolution,
/// `f_{Z_n}(x) = ∫ f_{Y_n}(y) f_{Z_{n-1}}(x/y) / y dy`, for `N ≤ 3`.
///
/// Each level is an adaptive quadrature in `u = ln(y - δ)`, so the cost grows
/// geometrically with `N`.
pub fn mellin_convolution_pdf(x: f64, p: &SumProblem, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let c = p.components();
    let d = p.delta();
    if x.is_nan() {
        return Err(Error::Domain("x is NaN".into()));
    }
    match c.len() {
        1 => Ok(shifted_pdf(&c[0], d, x)),
        2 => pdf2(x, &c[0], &c[1], d, cfg),
        3 => {
            if x <= d * d * d {
                return Ok(0.0);
            }
            let mut failure = None;
            let v = half(&c[2], d, x / (d * d), cfg, |y| {
                pdf2(x / y, &c[0], &c[1], d, cfg).unwrap_or_else(|e| {
                    failure = Some(e);
                    f64::NAN
                })
            });
            match failure {
                Some(e) => Err(e),
                None => v,
            }
        }
        n => Err(Error::Unsupported(format!(
            "Mellin convolution is limited to N ≤ 3, got N = {n}"
        ))),
    }
}
