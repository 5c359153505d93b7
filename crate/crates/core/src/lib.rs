//! Bounds and approximations for the distribution of a sum of independent
//! lognormal random variables.
//!
//! The central result is an upper bound on the CDF of `S_N = Σ e^{X_i}`
//! obtained from the inequality between the arithmetic and the *tangential*
//! mean `TM(y, δ) = Π(δ + y_i)^{1/N} - δ`:
//!
//! ```text
//! F_S(γ) ≤ P( Π (δ + e^{X_i}) ≤ (γ/N + δ)^N )
//! ```
//!
//! The right-hand side is the CDF of a product of shifted lognormals, which is
//! computed by numerical inversion of its Mellin transform. Closed-form
//! Q-function approximations and a Monte-Carlo reference complete the
//! toolbox.
//!
//! ```
//! use lognsum::{tm_bound_cdf, GaussianParams, QuadratureConfig, SumProblem};
//! let p = SumProblem::uniform(2, GaussianParams::new(0.0, 1.0)?, 10.0)?;
//! let b = tm_bound_cdf(2.0, &p, &QuadratureConfig::default())?;
//! // the exact CDF is 0.3942; the bound sits just above it
//! assert!(b.value > 0.3942 && b.value < 0.41);
//! # Ok::<(), lognsum::Error>(())
//! ```

pub mod approx;
pub mod bound;
pub mod curve;
pub mod error;
pub mod lognormal;
pub mod means;
pub mod mellin;
pub mod montecarlo;
pub mod normal;
pub mod quad;

/// Version of this library, recorded in every artifact the CLI writes.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use bound::{
    gm_bound_cdf, left_tail_cdf, left_tail_params, ln_left_tail_cdf, tm_bound_cdf,
    tm_bound_curve, tm_bound_pdf, tm_bound_pdf_grid, BoundResult,
};
pub use error::{Error, Result};
pub use lognormal::{
    db_to_natural, shifted_lognormal_cdf, shifted_lognormal_pdf, GaussianParams,
    ShiftedLognormal, SumProblem, DB_TO_NEPER,
};
pub use means::{arithmetic_mean, geometric_mean, tangential_mean, WeightVector};
pub use mellin::{
    mellin_convolution_pdf, mellin_transform, product_cdf, product_cdf_detailed, product_pdf,
    product_pdf_detailed, product_pdf_grid, CdfValue, ComplexAbscissa, InversionDiagnostics,
    PdfValue, QuadratureConfig,
};
pub use normal::{inverse_normal_cdf, ln_normal_cdf, ln_q_function, normal_cdf, q_function};
pub use approx::{
    approx_n2, approx_recursive, clt_ccdf, clt_cdf, clt_moments, exact_cdf_two, farley_ccdf,
    g_derivatives, gauss_hermite_rule, x0_solve,
};
pub use curve::{DistributionCurve, GammaGrid};
pub use montecarlo::{
    empirical_cdf, outage_probability, EmpiricalCurve, MCConfig, OutageEstimate, OutageMethod,
    SignalModel, RNG_ALGORITHM,
};

// The guide in book/ is compiled as documentation so that its snippets run as
// doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/means.md")]
    mod means {}
    #[doc = include_str!("../../../book/src/mellin.md")]
    mod mellin {}
    #[doc = include_str!("../../../book/src/bound.md")]
    mod bound {}
    #[doc = include_str!("../../../book/src/approximations.md")]
    mod approximations {}
    #[doc = include_str!("../../../book/src/montecarlo.md")]
    mod montecarlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
