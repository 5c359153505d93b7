//! Closed-form approximations to the CDF of a lognormal sum.
//!
//! * [`farley_ccdf`]: the classical order-statistics lower bound on the CCDF.
//! * [`approx_n2`], [`approx_recursive`]: products of Q-functions obtained by
//!   replacing `E[g(x)]` with `g(E[x])` inside the `δ → ∞` limit of the bound.
//! * [`clt_cdf`]: a central-limit form for large `N`, with moments computed by
//!   Gauss–Hermite quadrature.

mod clt;
mod concavity;
mod hermite;
mod recursive;

pub use clt::{clt_ccdf, clt_cdf, clt_moments, CltMoments};
pub use concavity::{exact_cdf_two, g_derivatives, x0_solve, GDerivatives, X0Solution};
pub use hermite::{gauss_hermite_rule, GaussHermiteRule, MAX_ORDER};
pub use recursive::{
    approx_n2, approx_recursive, conditional_mean_and_norm, farley_ccdf, recursion_states,
    RecursionState,
};

use crate::error::{domain, Result};

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}
