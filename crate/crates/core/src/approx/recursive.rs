use super::check_gamma;
use crate::error::{invalid, Error, Result};
use crate::lognormal::GaussianParams;
use crate::normal::{inverse_mills_ratio, ln_normal_cdf, normal_cdf};

/// Farley's lower bound on the CCDF, `1 - (1 - Q((ln γ - μ)/σ))^N`.
///
/// ```
/// use lognsum::{farley_ccdf, GaussianParams};
/// let p = GaussianParams::new(0.0, 1.0)?;
/// assert!((farley_ccdf(1.0, p, 2)? - 0.75).abs() < 1e-15);
/// # Ok::<(), lognsum::Error>(())
/// ```
pub fn farley_ccdf(gamma: f64, params: GaussianParams, n: usize) -> Result<f64> {
    check_gamma(gamma)?;
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let z = (gamma.ln() - params.mu()) / params.sigma();
    Ok(-(n as f64 * ln_normal_cdf(z)).exp_m1())
}

/// Mean and mass of `N(μ, σ²)` truncated to `x ≤ ln_cap`.
///
/// Returns `(μ_cond, C)` with `C = Φ((ln_cap - μ)/σ)` and
/// `μ_cond = μ - σ φ(z)/C`. Fails with [`Error::TailUnderflow`] once `C`
/// leaves the normal floating-point range.
pub fn conditional_mean_and_norm(ln_cap: f64, params: GaussianParams) -> Result<(f64, f64)> {
    if ln_cap.is_nan() {
        return Err(invalid("ln_cap is NaN"));
    }
    let z = (ln_cap - params.mu()) / params.sigma();
    let c = normal_cdf(z);
    if !c.is_normal() {
        return Err(Error::TailUnderflow(z));
    }
    Ok((params.mu() - params.sigma() * inverse_mills_ratio(z), c))
}

/// One step of the recursive approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionState {
    /// Remaining threshold `γ_k` after removing `k - 1` conditional means.
    pub gamma_k: f64,
    /// Conditional mean `μ_k` used for this step.
    pub mu_k: f64,
    /// Normalisation `C_k`.
    pub c_k: f64,
    /// Running product `Π C_j` up to this step.
    pub cdf_partial: f64,
}

/// Runs the recursion `γ_k = γ_{k-1} - e^{μ_k}` with
/// `(μ_k, C_k) = conditional_mean_and_norm(ln γ_{k-1})` for `k = 2..=n`.
///
/// Stops early (returning the states so far) once some `γ_k ≤ 0`.
pub fn recursion_states(gamma: f64, params: GaussianParams, n: usize) -> Result<Vec<RecursionState>> {
    check_gamma(gamma)?;
    if n < 2 {
        return Err(invalid(format!("the recursion needs n ≥ 2, got {n}")));
    }
    let mut out = Vec::with_capacity(n - 1);
    let mut g = gamma;
    let mut prod = 1.0;
    for _ in 2..=n {
        let (mu_k, c_k) = conditional_mean_and_norm(g.ln(), params)?;
        prod *= c_k;
        g -= mu_k.exp();
        out.push(RecursionState {
            gamma_k: g,
            mu_k,
            c_k,
            cdf_partial: prod,
        });
        if g <= 0.0 {
            break;
        }
    }
    Ok(out)
}

/// Approximation of `F_{S_N}(γ)` for `N` identical components:
/// `Π_{k=2..N} C_k · (1 - Q((ln γ_N - μ)/σ))`.
///
/// Returns 0 where the recursion runs out of threshold (`γ_k ≤ 0`) or where
/// some `C_k` underflows.
pub fn approx_recursive(gamma: f64, params: GaussianParams, n: usize) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma == f64::INFINITY {
        return Ok(1.0);
    }
    let states = match recursion_states(gamma, params, n) {
        Ok(s) => s,
        Err(Error::TailUnderflow(_)) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let last = states.last().expect("at least one step");
    if states.len() < n - 1 || last.gamma_k <= 0.0 {
        return Ok(0.0);
    }
    let z = (last.gamma_k.ln() - params.mu()) / params.sigma();
    Ok((last.cdf_partial * normal_cdf(z)).clamp(0.0, 1.0))
}

/// Approximation for `N = 2`: `C₂ (1 - Q((ln(γ - e^{μ₂}) - μ)/σ))`.
///
/// ```
/// use lognsum::{approx_n2, farley_ccdf, GaussianParams};
/// let p = GaussianParams::new(0.0, 0.5)?;
/// let cdf = approx_n2(2.0, p)?;
/// assert!(cdf > 0.0 && cdf < 1.0 - farley_ccdf(2.0, p, 2)?);
/// # Ok::<(), lognsum::Error>(())
/// ```
pub fn approx_n2(gamma: f64, params: GaussianParams) -> Result<f64> {
    approx_recursive(gamma, params, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(mu: f64, sigma: f64) -> GaussianParams {
        GaussianParams::new(mu, sigma).unwrap()
    }

    #[test]
    fn farley_known_values() {
        for n in 1..6 {
            let f = farley_ccdf(1.0, p(0.0, 1.0), n).unwrap();
            assert!((f - (1.0 - 0.5f64.powi(n as i32))).abs() < 1e-15);
        }
        let one = farley_ccdf(3.0, p(0.2, 0.7), 1).unwrap();
        assert!((one - normal_cdf(-(3f64.ln() - 0.2) / 0.7)).abs() < 1e-15);
        assert!(farley_ccdf(0.0, p(0.0, 1.0), 2).is_err());
    }

    #[test]
    fn conditional_mean_at_median() {
        let (m, c) = conditional_mean_and_norm(0.0, p(0.0, 1.0)).unwrap();
        assert_eq!(c, 0.5);
        assert!((m + 0.797_884_560_802_865_4).abs() < 1e-15);
        let (m, c) = conditional_mean_and_norm(1.5, p(1.5, 2.0)).unwrap();
        assert_eq!(c, 0.5);
        assert!((m - (1.5 - 2.0 * 0.797_884_560_802_865_4)).abs() < 1e-14);
    }

    #[test]
    fn conditional_mean_limits() {
        let (m, c) = conditional_mean_and_norm(f64::INFINITY, p(0.3, 1.0)).unwrap();
        assert_eq!((m, c), (0.3, 1.0));
        assert!(matches!(
            conditional_mean_and_norm(-40.0, p(0.0, 1.0)),
            Err(Error::TailUnderflow(_))
        ));
        // deep but representable tail: the mean sits just below the cap
        let (m, c) = conditional_mean_and_norm(-30.0, p(0.0, 1.0)).unwrap();
        assert!(c > 0.0 && m < -30.0 && m > -30.1);
    }

    #[test]
    fn n2_matches_closed_form() {
        let q = p(0.0, 1.0);
        for &g in &[0.5, 1.0, 2.0, 5.0, 30.0] {
            let (mu2, c2) = conditional_mean_and_norm(f64::ln(g), q).unwrap();
            let want = c2 * normal_cdf(f64::ln(g - mu2.exp()));
            assert!((approx_n2(g, q).unwrap() - want).abs() < 1e-15);
        }
        assert_eq!(approx_n2(f64::INFINITY, q).unwrap(), 1.0);
        assert!((approx_n2(1e8, q).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n3_matches_two_step_form() {
        for &s in &[0.5, 1.0, 2.0] {
            let q = p(0.0, s);
            for &g in &[1.0, 3.0, 10.0] {
                let (mu2, c2) = conditional_mean_and_norm(f64::ln(g), q).unwrap();
                let g2 = g - mu2.exp();
                let (mu3, c3) = conditional_mean_and_norm(g2.ln(), q).unwrap();
                let want = c3 * c2 * normal_cdf((f64::ln(g2 - mu3.exp())) / s);
                assert!((approx_recursive(g, q, 3).unwrap() - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn vanishes_for_tiny_thresholds() {
        // γ_k stays positive in exact arithmetic because the truncated mean
        // lies below the cap; tiny thresholds reach zero through underflow of
        // the normalisations instead.
        let q = p(0.0, 0.5);
        assert_eq!(approx_recursive(1e-300, q, 4).unwrap(), 0.0);
        assert_eq!(approx_n2(1e-200, q).unwrap(), 0.0);
        let st = recursion_states(0.05, p(0.0, 1.0), 4).unwrap();
        assert_eq!(st.len(), 3);
        assert!(st.iter().all(|k| k.gamma_k > 0.0));
        assert!(matches!(
            recursion_states(1e-3, q, 6),
            Err(Error::TailUnderflow(_))
        ));
    }

    #[test]
    fn rejects_bad_order() {
        assert!(approx_recursive(1.0, p(0.0, 1.0), 1).is_err());
        assert!(approx_n2(-1.0, p(0.0, 1.0)).is_err());
    }

    proptest! {
        #[test]
        fn recursion_base_is_n2(g in 1e-3f64..1e3, mu in -2.0f64..2.0, s in 0.2f64..3.0) {
            let q = p(mu, s);
            prop_assert_eq!(approx_recursive(g, q, 2).unwrap(), approx_n2(g, q).unwrap());
        }

        #[test]
        fn outputs_are_probabilities(g in 1e-4f64..1e4, s in 0.2f64..3.0, n in 2usize..8) {
            let v = approx_recursive(g, p(0.0, s), n).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn remaining_threshold_never_increases(g in 1e-2f64..1e3, s in 0.2f64..3.0, n in 2usize..10) {
            let st = match recursion_states(g, p(0.0, s), n) {
                Err(Error::TailUnderflow(_)) => return Ok(()),
                r => r.unwrap(),
            };
            let mut prev = g;
            for k in &st {
                prop_assert!(k.gamma_k <= prev);
                prop_assert!(k.c_k > 0.0 && k.c_k <= 1.0);
                prop_assert!((0.0..=1.0).contains(&k.cdf_partial));
                prev = k.gamma_k;
            }
        }

        #[test]
        fn conditional_mean_is_below_cap(z in -35.0f64..20.0, mu in -3.0f64..3.0, s in 0.1f64..3.0) {
            let cap = mu + s * z;
            let (m, c) = conditional_mean_and_norm(cap, p(mu, s)).unwrap();
            prop_assert!(m < cap);
            prop_assert!(c > 0.0 && c <= 1.0);
        }
    }
}
