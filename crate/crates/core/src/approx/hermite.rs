//! Gauss–Hermite rules for the weight `e^{-x²}`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{invalid, Result};

/// Largest supported rule order.
pub const MAX_ORDER: usize = 64;

/// An `M`-point Gauss–Hermite rule: `∫ f(x) e^{-x²} dx ≈ Σ w_m f(x_m)`.
///
/// Nodes are sorted ascending and exactly antisymmetric, weights symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermiteRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermiteRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[f(X)]` for `X ~ N(mu, sigma²)`, i.e. `π^{-1/2} Σ w_m f(√2 σ x_m + μ)`.
    pub fn expect_normal(&self, mu: f64, sigma: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let s = std::f64::consts::SQRT_2 * sigma;
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(s * x + mu))
            .sum();
        sum / PI.sqrt()
    }

    fn build(m: usize) -> Self {
        // Orthonormal Hermite polynomials p̃_0..p̃_m at x and p̃_m'(x).
        let eval = |x: f64| {
            let mut prev = 0.0;
            let mut cur = PI.powf(-0.25);
            let mut sq = cur * cur;
            for k in 0..m {
                let kf = k as f64;
                let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
                if k + 1 < m {
                    sq += cur * cur;
                }
            }
            // cur = p̃_m, prev = p̃_{m-1}, sq = Σ_{k<m} p̃_k²
            (cur, (2.0 * m as f64).sqrt() * prev, sq)
        };
        let half = m / 2;
        let bound = (2.0 * m as f64 + 1.0).sqrt() + 1.0;
        let mut upper = Vec::with_capacity(half);
        // The positive roots are the eigenvalues of the Jacobi matrix with
        // off-diagonals √(k/2); isolate the j-th largest by Sturm bisection.
        for j in 0..half {
            let target = m - j; // number of eigenvalues below the root, counting itself
            let (mut lo, mut hi) = (0.0, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(m, mid) >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let mut x = 0.5 * (lo + hi);
            for _ in 0..3 {
                let (p, dp, _) = eval(x);
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                if !step.is_finite() {
                    break;
                }
                x -= step;
            }
            upper.push(x);
        }
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for &x in &upper {
            nodes.push(-x);
            weights.push(1.0 / eval(x).2);
        }
        if m % 2 == 1 {
            nodes.push(0.0);
            weights.push(1.0 / eval(0.0).2);
        }
        for j in (0..half).rev() {
            nodes.push(upper[j]);
            weights.push(weights[j]);
        }
        Self { nodes, weights }
    }
}

/// Number of eigenvalues of the `m × m` Hermite Jacobi matrix below `x`.
fn sturm_count(m: usize, x: f64) -> usize {
    let mut count = 0;
    let mut d = -x;
    if d < 0.0 {
        count += 1;
    }
    for k in 1..m {
        let b2 = k as f64 / 2.0;
        let prev = if d == 0.0 { f64::EPSILON } else { d };
        d = -x - b2 / prev;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Returns the `m`-point rule, built once per order and cached for the life of
/// the process.
///
/// ```
/// let r = lognsum::approx::gauss_hermite_rule(2).unwrap();
/// assert!((r.nodes()[1] - 0.5f64.sqrt()).abs() < 1e-15);
/// ```
pub fn gauss_hermite_rule(m: usize) -> Result<&'static GaussHermiteRule> {
    static RULES: [OnceLock<GaussHermiteRule>; MAX_ORDER] = [const { OnceLock::new() }; MAX_ORDER];
    if m == 0 || m > MAX_ORDER {
        return Err(invalid(format!(
            "Gauss-Hermite order must be in 1..={MAX_ORDER}, got {m}"
        )));
    }
    Ok(RULES[m - 1].get_or_init(|| GaussHermiteRule::build(m)))
}
