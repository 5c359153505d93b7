//! The `N = 2` integrand `g(x) = 1 - Q((ln(γ - e^x) - μ)/σ)`, its derivatives
//! and the edge `x₀` of its concave region.

use super::check_gamma;
use crate::error::{domain, Error, Result};
use crate::lognormal::GaussianParams;
use crate::normal::{ln_normal_cdf, normal_cdf, INV_SQRT_2PI};
use crate::quad::{integrate, QuadOptions};

/// `γ - e^x` for `x < ln γ`, without cancellation near `ln γ`.
fn gap(x: f64, gamma: f64) -> f64 {
    -gamma * (x - gamma.ln()).exp_m1()
}

/// `γσ² + e^x ln(γ - e^x) - μ e^x`; `g` is concave where this is positive.
fn concavity(x: f64, gamma: f64, p: GaussianParams) -> f64 {
    let ex = x.exp();
    gamma * p.sigma() * p.sigma() + ex * (gap(x, gamma).ln() - p.mu())
}

/// `g(x)` and its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GDerivatives {
    pub g: f64,
    pub dg: f64,
    pub d2g: f64,
}

/// Evaluates `g(x) = Φ((ln(γ - e^x) - μ)/σ)` and its closed-form derivatives
///
/// ```text
/// g'(x)  = -e^x φ(z) / (σ (γ - e^x))
/// g''(x) = -e^x φ(z) (γσ² + e^x ln(γ - e^x) - μ e^x) / (σ³ (γ - e^x)²)
/// ```
///
/// with `z = (ln(γ - e^x) - μ)/σ`.
pub fn g_derivatives(x: f64, gamma: f64, params: GaussianParams) -> Result<GDerivatives> {
    check_gamma(gamma)?;
    if x.is_nan() || x >= gamma.ln() {
        return Err(domain(format!("x must be below ln(gamma) = {}, got {x}", gamma.ln())));
    }
    let s = params.sigma();
    let b = gap(x, gamma);
    let z = (b.ln() - params.mu()) / s;
    let common = INV_SQRT_2PI * (x - 0.5 * z * z).exp() / (s * b);
    Ok(GDerivatives {
        g: normal_cdf(z),
        dg: -common,
        d2g: -common * concavity(x, gamma, params) / (s * s * b),
    })
}

/// Root of the concavity condition and the gap `ε = ln γ - x₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct X0Solution {
    pub x0: f64,
    pub epsilon: f64,
    /// Value of `γσ² + e^{x₀} ln(γ - e^{x₀}) - μ e^{x₀}` at the returned root.
    pub residual: f64,
    /// Sign changes seen while scanning the bracket. More than one means the
    /// concave region is not an interval; `x0` is then the leftmost root.
    pub sign_changes: usize,
}

/// Solves `γσ² + e^{x₀} ln(γ - e^{x₀}) - μ e^{x₀} = 0` for `x₀ < ln γ`.
///
/// The bracket `(μ - 40σ, ln γ - 1e-12)` is scanned on a grid that is
/// logarithmic in the distance to `ln γ`, the leftmost sign change is refined
/// by bisection and a final secant step, and the number of sign changes is
/// reported rather than assumed to be one.
pub fn x0_solve(gamma: f64, params: GaussianParams) -> Result<X0Solution> {
    check_gamma(gamma)?;
    let lg = gamma.ln();
    let lo = params.mu() - 40.0 * params.sigma();
    if lo >= lg - 1e-12 {
        return Err(Error::NoRoot(format!(
            "empty bracket: ln(gamma) = {lg} is below mu - 40 sigma"
        )));
    }
    let h = |x: f64| concavity(x, gamma, params);
    const SCAN: usize = 4000;
    let (t_lo, t_hi) = ((1e-12f64).ln(), (lg - lo).ln());
    // ascending in x: distance to ln γ shrinks from lg - lo to 1e-12
    let xs: Vec<f64> = (0..=SCAN)
        .map(|i| lg - (t_hi + (t_lo - t_hi) * i as f64 / SCAN as f64).exp())
        .collect();
    let hs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
    let mut first = None;
    let mut changes = 0;
    for i in 0..SCAN {
        if (hs[i] > 0.0) != (hs[i + 1] > 0.0) {
            changes += 1;
            first.get_or_insert(i);
        }
    }
    let i = first.ok_or_else(|| {
        Error::NoRoot(format!(
            "no sign change of the concavity condition in ({lo}, {})",
            lg - 1e-12
        ))
    })?;
    let (mut a, mut b) = (xs[i], xs[i + 1]);
    let (mut ha, mut hb) = (hs[i], hs[i + 1]);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let hm = h(m);
        if (hm > 0.0) == (ha > 0.0) {
            a = m;
            ha = hm;
        } else {
            b = m;
            hb = hm;
        }
    }
    let mut x0 = if ha.abs() < hb.abs() { a } else { b };
    if ha != hb {
        let secant = a - ha * (b - a) / (hb - ha);
        if secant > a && secant < b && h(secant).abs() < h(x0).abs() {
            x0 = secant;
        }
    }
    Ok(X0Solution {
        x0,
        epsilon: lg - x0,
        residual: h(x0),
        sign_changes: changes,
    })
}

/// `P(e^{X_a} + e^{X_b} ≤ γ)` by one-dimensional adaptive quadrature.
///
/// The domain is split at `γ/2` so that each piece integrates over the
/// smaller summand, which keeps the integrands free of the logarithmic edge
/// at `ln γ`.
pub fn exact_cdf_two(gamma: f64, a: GaussianParams, b: GaussianParams) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma == f64::INFINITY {
        return Ok(1.0);
    }
    let half = (0.5 * gamma).ln();
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let zb = |v: f64| (v - b.mu()) / b.sigma();
    let za = |v: f64| (v - a.mu()) / a.sigma();
    // e^{X_a} ≤ γ/2 and e^{X_b} ≤ γ - e^{X_a}
    let lo_a = (a.mu() - 40.0 * a.sigma()).min(half - 40.0 * a.sigma());
    let first = integrate(
        |x: f64| a.density(x) * normal_cdf(zb(gap(x, gamma).ln())),
        lo_a,
        half,
        opts,
    )?;
    // e^{X_b} < γ/2 and γ/2 < e^{X_a} ≤ γ - e^{X_b}
    let ln_half_a = ln_normal_cdf(za(half));
    let lo_b = (b.mu() - 40.0 * b.sigma()).min(half - 40.0 * b.sigma());
    let second = integrate(
        |y: f64| {
            let top = ln_normal_cdf(za(gap(y, gamma).ln()));
            b.density(y) * top.exp() * -(ln_half_a - top).exp_m1()
        },
        lo_b,
        half,
        opts,
    )?;
    Ok((first.value + second.value).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(mu: f64, sigma: f64) -> GaussianParams {
        GaussianParams::new(mu, sigma).unwrap()
    }

    #[test]
    fn x0_residual_and_trends() {
        let mut prev = f64::INFINITY;
        for &g in &[0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
            let r = x0_solve(g, p(0.0, 1.0)).unwrap();
            assert!(r.residual.abs() < 1e-10, "{r:?}");
            assert!(r.epsilon > 0.0 && r.epsilon < prev, "{g}: {r:?}");
            prev = r.epsilon;
        }
        for &g in &[1.0, 3.0, 10.0] {
            let wide = x0_solve(g, p(0.0, 2.0)).unwrap().epsilon;
            let narrow = x0_solve(g, p(0.0, 0.5)).unwrap().epsilon;
            assert!(wide < narrow);
        }
    }

    #[test]
    fn x0_reports_missing_root() {
        // With ln γ far above μ + σ² the condition stays positive up to
        // ln γ - 1e-12.
        assert!(matches!(x0_solve(1e20, p(0.0, 1.0)), Err(Error::NoRoot(_))));
    }

    #[test]
    fn derivative_domain() {
        assert!(g_derivatives(0.0, 1.0, p(0.0, 1.0)).is_err());
        assert!(g_derivatives(1.0, 1.0, p(0.0, 1.0)).is_err());
        assert!(g_derivatives(-1.0, 1.0, p(0.0, 1.0)).is_ok());
    }

    #[test]
    fn concave_left_of_x0() {
        let q = p(0.0, 1.0);
        for &g in &[0.5, 2.0, 8.0] {
            let x0 = x0_solve(g, q).unwrap().x0;
            for k in 1..50 {
                let x = x0 - 0.2 * k as f64;
                let d = g_derivatives(x, g, q).unwrap();
                assert!(d.dg < 0.0);
                assert!(d.d2g <= 0.0, "x={x} g={g} d2g={}", d.d2g);
            }
            let right = 0.5 * (x0 + f64::ln(g));
            assert!(g_derivatives(right, g, q).unwrap().d2g > 0.0);
        }
    }

    #[test]
    fn exact_two_against_reference() {
        // Symmetry of the two components and a closed form at γ → ∞.
        let a = p(0.0, 1.0);
        let b = p(0.4, 0.7);
        let x = exact_cdf_two(2.5, a, b).unwrap();
        let y = exact_cdf_two(2.5, b, a).unwrap();
        assert!((x - y).abs() < 1e-12);
        assert!((exact_cdf_two(1e12, a, a).unwrap() - 1.0).abs() < 1e-12);
        // P(S₂ ≤ 2) for standard components, from a 2-D mpmath quadrature.
        let v = exact_cdf_two(2.0, a, a).unwrap();
        assert!((v - 0.394_155_432_306_629).abs() < 1e-9, "{v}");
    }

    proptest! {
        #[test]
        fn derivatives_match_finite_differences(
            gamma in 0.05f64..50.0, frac in 0.02f64..0.98, mu in -1.0f64..1.0, s in 0.3f64..2.0
        ) {
            let q = p(mu, s);
            let lg = gamma.ln();
            let x = lg - 6.0 * s * frac;
            // step sized to the local length scale of φ(z(x))
            let z = (gap(x, gamma).ln() - mu) / s;
            let dz = x.exp() / (s * gap(x, gamma));
            let h = 1e-3 * (lg - x).min(1.0 / (1.0 + z.abs() * dz));
            let f = |x: f64| g_derivatives(x, gamma, q).unwrap();
            // differentiate the smaller of g and 1 - g to avoid cancellation
            let upper = z > 0.0;
            let tail = |x: f64| {
                let z = (gap(x, gamma).ln() - mu) / s;
                if upper { -normal_cdf(-z) } else { normal_cdf(z) }
            };
            // central differences with one Richardson step
            let rich = |f: &dyn Fn(f64) -> f64| {
                let c = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
                (4.0 * c(0.5 * h) - c(h)) / 3.0
            };
            let d = f(x);
            let fd1 = rich(&tail);
            let fd2 = rich(&|x| f(x).dg);
            let tol = |a: f64| 1e-6 * a.abs();
            prop_assume!(d.g > 1e-280);
            prop_assert!((fd1 - d.dg).abs() < tol(d.dg), "dg {} vs {}", d.dg, fd1);
            prop_assert!((fd2 - d.d2g).abs() < tol(d.d2g), "d2g {} vs {}", d.d2g, fd2);
        }
    }
}
