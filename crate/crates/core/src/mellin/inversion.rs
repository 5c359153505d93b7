use super::kernel::{Kernel, LineProblem, Spectrum};
use super::QuadratureConfig;
use crate::error::{domain, Error, Result};
use crate::lognormal::SumProblem;
use crate::normal::{ln_normal_cdf, normal_cdf};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// How an inversion was carried out and how far it can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InversionDiagnostics {
    /// Exponential tilt `θ = Re s - 1` of the inversion line.
    pub tilt: f64,
    /// Last `β` sampled.
    pub beta_max: f64,
    /// Trapezoid step in `β`.
    pub step: f64,
    /// Number of line samples on `β ≥ 0`.
    pub terms: usize,
    /// Bound on the aliasing error, absolute.
    pub alias_bound: f64,
    /// Absolute error estimate combining aliasing and truncation.
    pub error_estimate: f64,
}

/// Density of the product with its inversion diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfValue {
    pub value: f64,
    /// Imaginary part of the full-line sum, which vanishes exactly in
    /// infinite precision.
    pub imaginary: f64,
    pub diagnostics: InversionDiagnostics,
}

/// CDF of the product with its complement and logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfValue {
    pub cdf: f64,
    pub ccdf: f64,
    /// `ln cdf`, finite even where `cdf` underflows.
    pub ln_cdf: f64,
    pub diagnostics: InversionDiagnostics,
}

impl CdfValue {
    fn exact(cdf: f64, ccdf: f64, ln_cdf: f64) -> Self {
        Self {
            cdf,
            ccdf,
            ln_cdf,
            diagnostics: InversionDiagnostics::default(),
        }
    }
}

/// With `δ = 0` the product is itself lognormal.
fn unshifted_moments(p: &SumProblem) -> (f64, f64) {
    let mu: f64 = p.components().iter().map(|c| c.mu()).sum();
    let var: f64 = p.components().iter().map(|c| c.sigma() * c.sigma()).sum();
    (mu, var.sqrt())
}

fn line_step(cfg: &QuadratureConfig, period: f64) -> f64 {
    match cfg.beta_density {
        Some(d) => 1.0 / d,
        None => TAU / period,
    }
}

/// Density of the log-excess sum `S` at each `c`, evaluated on one shared
/// line `Re s = α`. Returns `g(c)` values and the diagnostics.
pub(crate) fn sum_density(
    lp: &LineProblem,
    cs: &[f64],
    cfg: &QuadratureConfig,
    mirror: bool,
) -> Result<Vec<(f64, f64, InversionDiagnostics)>> {
    let theta = cfg.alpha - 1.0;
    let cum = lp.cumulants(theta, cfg);
    let c_max = cs.iter().cloned().fold(0.0, f64::max);
    let period = (1.25 * c_max).max(cum.k1 + 20.0 * cum.k2.sqrt());
    let h = line_step(cfg, period);
    // values are rescaled by e^k afterwards, so a positive k tightens the
    // stopping threshold by the same factor
    let tol = cfg.decay_tol * (-cum.k).exp().min(1.0);
    let pos = lp.spectrum(theta, h, 1.0, tol, cfg)?;
    let neg = if mirror {
        let fixed = QuadratureConfig {
            beta_max: Some(pos.beta_max()),
            ..*cfg
        };
        Some(lp.spectrum(theta, h, -1.0, tol, &fixed)?)
    } else {
        None
    };
    Ok(cs
        .iter()
        .map(|&c| {
            let scale = (cum.k - theta * c).exp();
            let (re, im, tail) = match &neg {
                Some(neg) => full_line(&pos, neg, c, cfg.filter),
                None => {
                    let (re, tail) = pos.line_sum(c, theta, Kernel::Density, cfg.filter);
                    (re, 0.0, tail)
                }
            };
            let diag = InversionDiagnostics {
                tilt: theta,
                beta_max: pos.beta_max(),
                step: h,
                terms: pos.values.len(),
                alias_bound: 0.0,
                error_estimate: scale * tail,
            };
            (scale * re, scale * im, diag)
        })
        .collect())
}

/// Full-line trapezoid sum using independently computed samples on both
/// half lines. Returns the real part, the imaginary part and a
/// rounding/truncation scale.
fn full_line(pos: &Spectrum, neg: &Spectrum, c: f64, filter: bool) -> (f64, f64, f64) {
    let n = pos.values.len().min(neg.values.len());
    let b = pos.beta_max().max(pos.h);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for k in 0..n {
        let beta = k as f64 * pos.h;
        let e = Complex64::from_polar(1.0, -beta * c);
        let mut w = 1.0;
        if filter {
            w = (-36.0 * (beta / b).powi(8)).exp();
        }
        let t = if k == 0 {
            pos.values[0]
        } else {
            pos.values[k] * e + neg.values[k] * e.conj()
        };
        sum += w * t;
        mag += w * (pos.values[k].norm() + neg.values[k].norm());
    }
    let scale = pos.h / TAU;
    (
        sum.re * scale,
        sum.im * scale,
        mag * scale * 64.0 * f64::EPSILON,
    )
}

/// Density of `Z = Π Y_i` at `x`, with diagnostics.
///
/// Both halves of the inversion line are computed independently so that the
/// imaginary residual measures genuine numerical asymmetry.
pub fn product_pdf_detailed(x: f64, p: &SumProblem, cfg: &QuadratureConfig) -> Result<PdfValue> {
    cfg.validate()?;
    let delta = p.delta();
    let n = p.n() as f64;
    if x.is_nan() {
        return Err(domain("x is NaN"));
    }
    if x <= 0.0 || (delta > 0.0 && x.ln() <= n * delta.ln()) {
        return Ok(PdfValue {
            value: 0.0,
            imaginary: 0.0,
            diagnostics: InversionDiagnostics::default(),
        });
    }
    if delta == 0.0 {
        let (mu, sigma) = unshifted_moments(p);
        let z = (x.ln() - mu) / sigma;
        return Ok(PdfValue {
            value: (-0.5 * z * z).exp() / (sigma * x * TAU.sqrt()),
            imaginary: 0.0,
            diagnostics: InversionDiagnostics::default(),
        });
    }
    let lp = LineProblem::new(p);
    let c = x.ln() - n * delta.ln();
    let (re, im, diag) = sum_density(&lp, &[c], cfg, true)?.pop().expect("one point");
    let value = re / x;
    let imaginary = im / x;
    // rounding floor: 64 ulp of the absolute terms
    let floor = diag.error_estimate / x;
    if imaginary.abs() > 1e-6 * value.abs() + floor {
        return Err(Error::IllConditioned {
            real: value,
            imaginary,
        });
    }
    Ok(PdfValue {
        value,
        imaginary,
        diagnostics: diag,
    })
}

/// Density of `Z = Π Y_i` at `x`; zero for `x ≤ δ^N`.
///
/// ```
/// use lognsum::{product_pdf, shifted_lognormal_pdf, GaussianParams, QuadratureConfig, ShiftedLognormal, SumProblem};
/// let g = GaussianParams::new(0.0, 1.0)?;
/// let one = SumProblem::uniform(1, g, 2.0)?;
/// let f = product_pdf(3.5, &one, &QuadratureConfig::default())?;
/// let y = ShiftedLognormal::new(g, 2.0)?;
/// assert!((f - shifted_lognormal_pdf(3.5, &y)).abs() < 1e-8);
/// # Ok::<(), lognsum::Error>(())
/// ```
pub fn product_pdf(x: f64, p: &SumProblem, cfg: &QuadratureConfig) -> Result<f64> {
    product_pdf_detailed(x, p, cfg).map(|v| v.value)
}

/// Density of `Z` on a grid of points, sharing one line evaluation. Only the
/// `β ≥ 0` half is computed, using the conjugate symmetry of the transform.
pub fn product_pdf_grid(xs: &[f64], p: &SumProblem, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let delta = p.delta();
    let n = p.n() as f64;
    if delta == 0.0 {
        return xs
            .iter()
            .map(|&x| product_pdf(x, p, cfg))
            .collect::<Result<Vec<_>>>();
    }
    let floor = n * delta.ln();
    let inside: Vec<(usize, f64)> = xs
        .iter()
        .enumerate()
        .filter(|(_, x)| **x > 0.0 && x.ln() > floor)
        .map(|(i, x)| (i, x.ln() - floor))
        .collect();
    let mut out = vec![0.0; xs.len()];
    if inside.is_empty() {
        return Ok(out);
    }
    let cs: Vec<f64> = inside.iter().map(|p| p.1).collect();
    let lp = LineProblem::new(p);
    for ((i, _), (g, _, _)) in inside.iter().zip(sum_density(&lp, &cs, cfg, false)?) {
        out[*i] = g / xs[*i];
    }
    Ok(out)
}

/// CDF of `S = Σ V_i` at `c > 0` by inversion along a saddle-point line.
///
/// For `c` below the mean the line sits at `θ < 0` and the sum yields the
/// CDF directly; above the mean it sits at `θ > 0` and yields the CCDF. Both
/// are therefore accurate relative to the smaller of the two.
pub(crate) fn sum_cdf(lp: &LineProblem, c: f64, cfg: &QuadratureConfig) -> Result<CdfValue> {
    if c <= 0.0 {
        return Ok(CdfValue::exact(0.0, 1.0, f64::NEG_INFINITY));
    }
    if c == f64::INFINITY {
        return Ok(CdfValue::exact(1.0, 0.0, 0.0));
    }
    let at0 = lp.cumulants(0.0, cfg);
    let sd0 = at0.k2.sqrt();
    let saddle = lp.saddle(c, cfg);
    let mut theta = saddle;
    let mut cum = lp.cumulants(theta, cfg);
    // Near the mean the saddle tends to zero, which would need an unbounded
    // period. Push the tilt out to about one standard deviation, but stop
    // before the exponential scale e^{K-θc} costs more than a factor e in
    // cancellation.
    if theta.abs() < 1.0 / sd0 {
        let best = cum.k - saddle * c;
        let sign = if c < at0.k1 { -1.0 } else { 1.0 };
        theta = sign / sd0;
        loop {
            cum = lp.cumulants(theta, cfg);
            if cum.k - theta * c <= best + 1.0 || theta.abs() <= saddle.abs() {
                break;
            }
            theta *= 0.5;
        }
        if theta.abs() < saddle.abs() {
            theta = saddle;
            cum = lp.cumulants(theta, cfg);
        }
    }
    let ln_tol = (1.0 / cfg.alias_tol).ln();
    let chernoff = cum.k - theta * c;
    // Poisson summation: the trapezoid sum picks up the tail probability at
    // c ± kP weighted by e^{θkP}. Chernoff bounds on those terms fix P.
    let twice = (theta > 0.0).then(|| lp.cumulants(2.0 * theta, cfg).k);
    let period = match twice {
        None => (1.1 * c).max((ln_tol - chernoff) / -theta),
        Some(k2t) => ((k2t - cum.k - theta * c + ln_tol) / theta).max((ln_tol - chernoff) / theta),
    };
    let h = line_step(cfg, period);
    let spec = lp.spectrum(theta, h, 1.0, cfg.decay_tol, cfg)?;
    let (sum, tail) = spec.line_sum(c, theta, Kernel::Tail, cfg.filter);
    let p_len = TAU / h;
    let alias = match twice {
        None => {
            let a = (theta * p_len).exp();
            a / (1.0 - a)
        }
        Some(k2t) => (-theta * p_len).exp() + (k2t - 2.0 * theta * c - theta * p_len).exp(),
    };
    let scale = chernoff.exp();
    let mut diag = InversionDiagnostics {
        tilt: theta,
        beta_max: spec.beta_max(),
        step: h,
        terms: spec.values.len(),
        alias_bound: alias,
        error_estimate: 0.0,
    };
    if sum <= 0.0 {
        return Err(Error::NumericFailure {
            what: format!("tail inversion at tilt {theta:.4e} gave a non-positive sum"),
            error_estimate: scale * tail,
        });
    }
    let ln_tail = chernoff + sum.ln();
    let tail_p = ln_tail.exp();
    diag.error_estimate = alias + scale * tail;
    if theta < 0.0 {
        Ok(CdfValue {
            cdf: tail_p.min(1.0),
            ccdf: (1.0 - tail_p).max(0.0),
            ln_cdf: ln_tail.min(0.0),
            diagnostics: diag,
        })
    } else {
        Ok(CdfValue {
            cdf: (1.0 - tail_p).max(0.0),
            ccdf: tail_p.min(1.0),
            ln_cdf: (-tail_p).ln_1p(),
            diagnostics: diag,
        })
    }
}

/// CDF of `Z = Π Y_i` at `gamma_z`, with its complement and diagnostics.
pub fn product_cdf_detailed(
    gamma_z: f64,
    p: &SumProblem,
    cfg: &QuadratureConfig,
) -> Result<CdfValue> {
    cfg.validate()?;
    if gamma_z.is_nan() {
        return Err(domain("gamma_z is NaN"));
    }
    if gamma_z <= 0.0 {
        return Ok(CdfValue::exact(0.0, 1.0, f64::NEG_INFINITY));
    }
    let delta = p.delta();
    if delta == 0.0 {
        let (mu, sigma) = unshifted_moments(p);
        let z = (gamma_z.ln() - mu) / sigma;
        return Ok(CdfValue::exact(normal_cdf(z), normal_cdf(-z), ln_normal_cdf(z)));
    }
    let c = gamma_z.ln() - p.n() as f64 * delta.ln();
    sum_cdf(&LineProblem::new(p), c, cfg)
}

/// `P(Z ≤ γ_z)` for the product `Z = Π Y_i`; zero for `γ_z ≤ δ^N`.
pub fn product_cdf(gamma_z: f64, p: &SumProblem, cfg: &QuadratureConfig) -> Result<f64> {
    product_cdf_detailed(gamma_z, p, cfg).map(|v| v.cdf)
}
