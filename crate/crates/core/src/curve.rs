//! Threshold grids and tabulated distribution curves.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Evenly spaced thresholds, linearly or logarithmically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl GammaGrid {
    pub fn new(min: f64, max: f64, points: usize, log: bool) -> Result<Self> {
        let g = Self { min, max, points, log };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(invalid("grid limits must be finite"));
        }
        if self.points == 0 {
            return Err(invalid("grid needs at least one point"));
        }
        if self.points > 1 && self.min >= self.max {
            return Err(invalid(format!(
                "grid min ({}) must be below max ({})",
                self.min, self.max
            )));
        }
        if self.log && self.min <= 0.0 {
            return Err(invalid("a log-spaced grid needs a positive minimum"));
        }
        if self.min < 0.0 {
            return Err(invalid("thresholds must be non-negative"));
        }
        Ok(())
    }

    /// The grid values, with both endpoints hit exactly.
    ///
    /// ```
    /// use lognsum::curve::GammaGrid;
    /// let g = GammaGrid::new(0.1, 10.0, 3, true)?.values();
    /// assert_eq!((g[0], g[2]), (0.1, 10.0));
    /// assert!((g[1] - 1.0).abs() < 1e-15);
    /// # Ok::<(), lognsum::Error>(())
    /// ```
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == last {
                    return self.max;
                }
                let t = i as f64 / last as f64;
                if self.log {
                    (self.min.ln() + t * (self.max / self.min).ln()).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }
}

/// One method's values along a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
    /// Standard errors for Monte-Carlo columns.
    pub stderr: Option<Vec<f64>>,
}

/// A threshold grid with one or more CDF or CCDF columns.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct DistributionCurve {
    pub gammas: Vec<f64>,
    pub columns: Vec<Column>,
}

impl DistributionCurve {
    pub fn new(gammas: Vec<f64>) -> Self {
        Self {
            gammas,
            columns: Vec::new(),
        }
    }

    /// Appends a column; its length must match the grid.
    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>, stderr: Option<Vec<f64>>) -> Result<()> {
        let n = self.gammas.len();
        if values.len() != n || stderr.as_ref().is_some_and(|s| s.len() != n) {
            return Err(invalid("column length does not match the grid"));
        }
        self.columns.push(Column {
            name: name.into(),
            values,
            stderr,
        });
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// True when the finite entries of `v` never decrease by more than `tol`.
pub fn is_non_decreasing(v: &[f64], tol: f64) -> bool {
    let finite: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
    finite.windows(2).all(|w| w[1] >= w[0] - tol)
}
