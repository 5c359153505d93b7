use super::kernel::{tilted_moments, Component};
use super::{ComplexAbscissa, QuadratureConfig};
use crate::error::{Error, Result};
use crate::lognormal::ShiftedLognormal;
use crate::quad::{integrate, QuadOptions};
use num_complex::Complex64;

/// Mellin transform `φ_Y(s) = E[Y^{s-1}]` of `Y = δ + e^X`.
///
/// The integral is taken along a horizontal line lifted into the upper (or
/// lower) half plane by an amount that grows with `|β|`, which cancels the
/// oscillation of `y^{iβ}`. Accuracy is `cfg.adaptive_tol` relative to
/// `φ_Y(α)`.
///
/// ```
/// use lognsum::{mellin_transform, ComplexAbscissa, GaussianParams, QuadratureConfig, ShiftedLognormal};
/// let y = ShiftedLognormal::new(GaussianParams::new(0.0, 1.0)?, 2.0)?;
/// let s = ComplexAbscissa::new(2.0, 0.0)?;
/// let phi = mellin_transform(&y, s, &QuadratureConfig::default())?;
/// assert!((phi.re - (2.0 + 0.5f64.exp())).abs() < 1e-9);
/// # Ok::<(), lognsum::Error>(())
/// ```
pub fn mellin_transform(
    d: &ShiftedLognormal,
    s: ComplexAbscissa,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    let c = Component::new(d.params(), d.delta(), 1);
    let theta = s.alpha - 1.0;
    let grid = c.grid(theta, cfg);
    let ln_m = tilted_moments(&c, theta, &grid).ln_m;
    let y = c.height(theta, s.beta);
    let sv = Complex64::new(theta, s.beta);
    let integrand = |u: f64| {
        let z = Complex64::new(u, y);
        (c.ln_density(z) + sv * c.v_complex(z) - ln_m).exp()
    };
    let lo = grid.start;
    let hi = grid.node(grid.count - 1);
    let opts = QuadOptions {
        abs_tol: 0.1 * cfg.adaptive_tol,
        rel_tol: cfg.adaptive_tol,
        max_intervals: 4000,
    };
    let r = integrate(integrand, lo, hi, opts).map_err(|e| match e {
        Error::NumericFailure { error_estimate, .. } => Error::NumericFailure {
            what: "Mellin transform quadrature".into(),
            error_estimate: error_estimate * ln_m.exp(),
        },
        other => other,
    })?;
    let shift = if c.shifted {
        Complex64::new(theta, s.beta) * c.ln_delta
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(r.value * (shift + ln_m).exp())
}
