//! Mellin transform of the shifted lognormal and inversion of products.
//!
//! The product `Z = Π Y_i` of shifted lognormals has Mellin transform
//! `Π φ_{Y_i}(s)`. Its density and CDF are recovered by a trapezoidal sum
//! along the line `Re s = α`. Internally every quantity is expressed through
//! `ln Z = N ln δ + Σ V_i`, which keeps `δ^N`-sized numbers out of the
//! arithmetic.

mod convolution;
pub(crate) mod kernel;
pub(crate) mod inversion;
mod transform;

pub use convolution::mellin_convolution_pdf;
pub use inversion::{
    product_cdf, product_cdf_detailed, product_pdf, product_pdf_detailed, product_pdf_grid,
    CdfValue, InversionDiagnostics, PdfValue,
};
pub use transform::mellin_transform;

use crate::error::{invalid, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point `s = α + iβ` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAbscissa {
    pub alpha: f64,
    pub beta: f64,
}

impl ComplexAbscissa {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(invalid(format!("abscissa must be finite, got {alpha}+{beta}i")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.alpha, self.beta)
    }
}

/// Tuning knobs for the transform and its inversion.
///
/// The defaults are chosen so that the inversion tests in this crate pass with
/// margin; they can be tightened at the cost of run time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Real part of the inversion line for densities. CDFs pick their own
    /// line by a saddle-point rule.
    pub alpha: f64,
    /// Fixed truncation of the line integral. `None` extends the line until
    /// the product transform has decayed below `decay_tol`.
    pub beta_max: Option<f64>,
    /// Fixed trapezoid density in samples per unit of `β`. `None` picks the
    /// step from an aliasing bound.
    pub beta_density: Option<f64>,
    /// Relative magnitude of the product transform at which the line is cut.
    pub decay_tol: f64,
    /// Target relative error for aliasing in the line sum.
    pub alias_tol: f64,
    /// Tolerance for adaptive quadrature (transform and convolution).
    pub adaptive_tol: f64,
    /// Truncation of the Gaussian integrals, in standard deviations.
    pub support_cut: f64,
    /// Trapezoid step in the log variable, relative to the tilted width.
    pub u_step: f64,
    /// Apply a smooth spectral window `exp(-36 (β/β_max)^8)` to the line sum.
    pub filter: bool,
    /// Upper limit on the number of line samples.
    pub max_terms: usize,
    /// Number of line samples that share one set of contour nodes.
    pub block_len: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta_max: None,
            beta_density: None,
            decay_tol: 1e-8,
            alias_tol: 1e-10,
            adaptive_tol: 1e-10,
            support_cut: 12.0,
            u_step: 0.1,
            filter: true,
            max_terms: 8_000_000,
            block_len: 256,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive, got {v}")))
            }
        };
        if !self.alpha.is_finite() {
            return Err(invalid("alpha must be finite"));
        }
        if let Some(b) = self.beta_max {
            pos(b, "beta_max")?;
        }
        if let Some(d) = self.beta_density {
            pos(d, "beta_density")?;
        }
        pos(self.decay_tol, "decay_tol")?;
        pos(self.alias_tol, "alias_tol")?;
        pos(self.adaptive_tol, "adaptive_tol")?;
        pos(self.support_cut, "support_cut")?;
        pos(self.u_step, "u_step")?;
        if self.max_terms < 2 {
            return Err(invalid("max_terms must be at least 2"));
        }
        if self.block_len < 1 {
            return Err(invalid("block_len must be at least 1"));
        }
        Ok(())
    }
}
