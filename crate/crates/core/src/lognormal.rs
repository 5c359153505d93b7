//! Lognormal parameterisation and the shifted-lognormal variable `Y = δ + e^X`.

use crate::error::{invalid, Result};
use crate::normal::{normal_cdf, INV_SQRT_2PI};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_10;

/// Factor converting decibels to nepers of power, `ln(10) / 10`.
pub const DB_TO_NEPER: f64 = LN_10 / 10.0;

/// Mean and standard deviation of the Gaussian exponent `X`, in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    mu: f64,
    sigma: f64,
}

impl GaussianParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(invalid(format!("mu must be finite, got {mu}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid(format!("sigma must be positive and finite, got {sigma}")));
        }
        Ok(Self { mu, sigma })
    }

    /// Builds parameters from decibel values (see [`db_to_natural`]).
    pub fn from_db(mu_db: f64, sigma_db: f64) -> Result<Self> {
        db_to_natural(mu_db, sigma_db)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Density of `X` at `x`.
    pub fn density(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        INV_SQRT_2PI * (-0.5 * z * z).exp() / self.sigma
    }

    /// Mean of `e^X`.
    pub fn lognormal_mean(&self) -> f64 {
        (self.mu + 0.5 * self.sigma * self.sigma).exp()
    }
}

/// Converts decibel parameters to natural units: `μ = λ μ_dB`, `σ = λ σ_dB`
/// with `λ = ln(10)/10`.
pub fn db_to_natural(mu_db: f64, sigma_db: f64) -> Result<GaussianParams> {
    GaussianParams::new(DB_TO_NEPER * mu_db, DB_TO_NEPER * sigma_db)
}

/// `Y = δ + e^X` with `X ~ N(μ, σ²)` and `δ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedLognormal {
    params: GaussianParams,
    delta: f64,
}

impl ShiftedLognormal {
    pub fn new(params: GaussianParams, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(Self { params, delta })
    }

    pub fn params(&self) -> GaussianParams {
        self.params
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Density of `Y`; zero for `y ≤ δ`.
    pub fn pdf(&self, y: f64) -> f64 {
        if y.is_nan() {
            return f64::NAN;
        }
        if y <= self.delta {
            return 0.0;
        }
        let w = y - self.delta;
        self.params.density(w.ln()) / w
    }

    /// `P(Y ≤ γ)`; zero for `γ ≤ δ`.
    pub fn cdf(&self, gamma: f64) -> f64 {
        if gamma.is_nan() {
            return f64::NAN;
        }
        if gamma <= self.delta {
            return 0.0;
        }
        normal_cdf(((gamma - self.delta).ln() - self.params.mu) / self.params.sigma)
    }

    /// `P(Y > γ)`, accurate in the upper tail.
    pub fn ccdf(&self, gamma: f64) -> f64 {
        if gamma.is_nan() {
            return f64::NAN;
        }
        if gamma <= self.delta {
            return 1.0;
        }
        normal_cdf(-((gamma - self.delta).ln() - self.params.mu) / self.params.sigma)
    }
}

/// Density of `Y = δ + e^X`; zero for `y ≤ δ`.
pub fn shifted_lognormal_pdf(y: f64, d: &ShiftedLognormal) -> f64 {
    d.pdf(y)
}

/// CDF of `Y = δ + e^X`; zero for `γ ≤ δ`.
pub fn shifted_lognormal_cdf(gamma: f64, d: &ShiftedLognormal) -> f64 {
    d.cdf(gamma)
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("delta must be finite and non-negative, got {delta}")))
    }
}

/// A sum of `N` independent lognormals `S = Σ e^{X_i}` together with the
/// shift `δ` used by the Mellin-domain bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SumProblem {
    components: Vec<GaussianParams>,
    delta: f64,
}

impl SumProblem {
    pub fn new(components: Vec<GaussianParams>, delta: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("a sum needs at least one component"));
        }
        check_delta(delta)?;
        Ok(Self { components, delta })
    }

    /// `N` identically distributed components.
    pub fn uniform(n: usize, params: GaussianParams, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("N must be at least 1"));
        }
        Self::new(vec![params; n], delta)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[GaussianParams] {
        &self.components
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same components with a different shift.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.components.clone(), delta)
    }

    /// Returns the common parameters if every component is identical.
    pub fn uniform_params(&self) -> Option<GaussianParams> {
        let first = self.components[0];
        self.components.iter().all(|p| *p == first).then_some(first)
    }

    /// The `i`-th shifted component `δ + e^{X_i}`.
    pub fn shifted(&self, i: usize) -> ShiftedLognormal {
        ShiftedLognormal {
            params: self.components[i],
            delta: self.delta,
        }
    }

    /// Expected value of the sum.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(GaussianParams::lognormal_mean).sum()
    }
}
