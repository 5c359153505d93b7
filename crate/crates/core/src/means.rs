//! Arithmetic, geometric and tangential means of positive vectors.

use crate::error::{domain, invalid, Result};

/// Non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Validates that every weight is finite and non-negative and that they
    /// sum to one within `1e-12`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("weight vector is empty"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("weights must sum to 1, got {total}")));
        }
        Ok(Self(weights))
    }

    /// Equal weights `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("weight vector is empty"));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_positive(y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(invalid("input vector is empty"));
    }
    if let Some(v) = y.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(domain(format!("entries must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `(1/N) Σ y_i`.
pub fn arithmetic_mean(y: &[f64]) -> Result<f64> {
    check_positive(y)?;
    // Scale first so that sums of values near f64::MAX do not overflow.
    let m = y.iter().cloned().fold(0.0, f64::max);
    Ok(m * (y.iter().map(|v| v / m).sum::<f64>() / y.len() as f64))
}

/// `(Π y_i)^{1/N}`, computed in the log domain.
pub fn geometric_mean(y: &[f64]) -> Result<f64> {
    check_positive(y)?;
    Ok((y.iter().map(|v| v.ln()).sum::<f64>() / y.len() as f64).exp())
}

/// Tangential mean `Π (δ + y_i)^{α_i} - δ`.
///
/// With uniform weights this interpolates between the geometric mean
/// (`δ = 0`) and the arithmetic mean (`δ → ∞`). When `δ` dominates the
/// entries the result is evaluated as `δ · expm1(Σ α_i ln1p(y_i/δ))` so that
/// the subtraction of `δ` loses nothing.
pub fn tangential_mean(y: &[f64], delta: f64, weights: Option<&WeightVector>) -> Result<f64> {
    check_positive(y)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(invalid(format!("delta must be finite and non-negative, got {delta}")));
    }
    let uniform;
    let w = match weights {
        Some(w) => {
            if w.len() != y.len() {
                return Err(invalid(format!(
                    "{} weights for {} entries",
                    w.len(),
                    y.len()
                )));
            }
            w.as_slice()
        }
        None => {
            uniform = vec![1.0 / y.len() as f64; y.len()];
            &uniform
        }
    };
    if y.len() == 1 {
        return Ok(y[0]);
    }
    let y_max = y.iter().cloned().fold(0.0, f64::max);
    if delta > y_max {
        let s: f64 = y.iter().zip(w).map(|(v, a)| a * (v / delta).ln_1p()).sum();
        Ok(delta * s.exp_m1())
    } else {
        let s: f64 = y.iter().zip(w).map(|(v, a)| a * (delta + v).ln()).sum();
        Ok(s.exp() - delta)
    }
}
