//! Line-integral engine shared by the transform, inversion and bound code.
//!
//! Every component is handled through its excess log variable
//! `V = ln(Y/δ) = ln1p(e^X/δ) ≥ 0`, so that `φ_Y(s) = δ^{s-1} M(s-1)` with
//! `M(θ) = E[e^{θV}]`. `M` is evaluated by the trapezoidal rule in `u = X`
//! along the horizontal line `u + iy`. The integrand is analytic in the strip
//! `|Im u| < π`, and lifting the line by `y ≈ atan(β/|θ|)` (capped at `π/2`)
//! turns the oscillation of `e^{iβV}` into exponential decay, which is what
//! keeps the node count bounded as `β` grows.

use super::QuadratureConfig;
use crate::error::{Error, Result};
use crate::lognormal::{GaussianParams, SumProblem};
use crate::normal::LN_SQRT_2PI;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Nodes whose weight falls below this are dropped from a block; `R` is
/// normalised so that `R(0) = 1`.
const PRUNE: f64 = 1e-19;

/// A distinct component, its multiplicity in the sum and its shift.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Component {
    pub mu: f64,
    pub sigma: f64,
    pub ln_delta: f64,
    /// `false` for `δ = 0`, where `V` is `X` itself.
    pub shifted: bool,
    pub mult: i32,
}

impl Component {
    pub fn new(p: GaussianParams, delta: f64, mult: i32) -> Self {
        Self {
            mu: p.mu(),
            sigma: p.sigma(),
            ln_delta: if delta > 0.0 { delta.ln() } else { 0.0 },
            shifted: delta > 0.0,
            mult,
        }
    }

    /// `V(u)` on the real line.
    pub fn v(&self, u: f64) -> f64 {
        if !self.shifted {
            return u;
        }
        let t = u - self.ln_delta;
        if t > 36.0 {
            t + (-t).exp()
        } else {
            t.exp().ln_1p()
        }
    }

    /// `dV/du` and `d²V/du²` on the real line.
    fn v_derivs(&self, u: f64) -> (f64, f64) {
        if !self.shifted {
            return (1.0, 0.0);
        }
        let t = u - self.ln_delta;
        let s = if t >= 0.0 {
            1.0 / (1.0 + (-t).exp())
        } else {
            let e = t.exp();
            e / (1.0 + e)
        };
        (s, s * (1.0 - s))
    }

    /// `V(z)` for complex `z` with `|Im z| < π`.
    pub fn v_complex(&self, z: Complex64) -> Complex64 {
        if !self.shifted {
            return z;
        }
        let t = z - self.ln_delta;
        if t.re > 36.0 {
            return t + (-t).exp();
        }
        if t.re < -40.0 {
            return t.exp();
        }
        let w = t.exp();
        if w.norm_sqr() < 1e-6 {
            // ln(1+w) by series; the direct form loses digits of w.
            w * (1.0 - w * (0.5 - w * (1.0 / 3.0 - w * (0.25 - w * 0.2))))
        } else {
            (1.0 + w).ln()
        }
    }

    pub fn ln_density(&self, z: Complex64) -> Complex64 {
        let d = (z - self.mu) / self.sigma;
        -0.5 * d * d - self.sigma.ln() - LN_SQRT_2PI
    }

    /// Height of the integration line for the transform at `θ + iβ`.
    pub fn height(&self, theta: f64, beta: f64) -> f64 {
        let b = beta.abs();
        let y = if !self.shifted {
            self.sigma * self.sigma * b
        } else {
            FRAC_PI_2
                .min(self.sigma * self.sigma * b)
                .min(PI - b.atan2(theta))
        };
        y.copysign(beta)
    }

    /// Location of the maximum of the tilted log-density
    /// `-(u-μ)²/(2σ²) + θV(u)`.
    fn tilted_peak(&self, theta: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        if !self.shifted {
            return self.mu + theta * s2;
        }
        let slope = |u: f64| -(u - self.mu) / s2 + theta * self.v_derivs(u).0;
        let (mut lo, mut hi) = if theta >= 0.0 {
            (self.mu, self.mu + theta * s2)
        } else {
            (self.mu + theta * s2, self.mu)
        };
        if lo == hi {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Trapezoid grid in `u` adapted to the tilt `θ`.
    pub fn grid(&self, theta: f64, cfg: &QuadratureConfig) -> UGrid {
        let peak = self.tilted_peak(theta);
        let (_, v2) = self.v_derivs(peak);
        let curvature = 1.0 / (self.sigma * self.sigma) + (-theta).max(0.0) * v2;
        let width = curvature.sqrt().recip();
        let step = cfg.u_step * width.min(1.0);
        let k = cfg.support_cut;
        // With θ > 0 the tilted density can be bimodal, with modes anywhere
        // in [μ, μ + θσ²], so the grid spans that whole bracket.
        let far = self.mu + theta.max(0.0) * self.sigma * self.sigma;
        let lo = self.mu.min(peak) - k * self.sigma;
        let hi = self.mu.max(peak).max(far) + k * self.sigma;
        let count = (((hi - lo) / step).ceil() as usize).clamp(16, 200_000);
        UGrid {
            start: lo,
            step: (hi - lo) / count as f64,
            count: count + 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct UGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl UGrid {
    pub fn node(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }
}

/// Real-line moments of `V` under the tilt `θ`: `ln M(θ)`, mean and variance.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tilted {
    pub ln_m: f64,
    pub mean: f64,
    pub var: f64,
}

pub(crate) fn tilted_moments(c: &Component, theta: f64, grid: &UGrid) -> Tilted {
    let logs: Vec<(f64, f64)> = (0..grid.count)
        .map(|i| {
            let u = grid.node(i);
            let v = c.v(u);
            let d = (u - c.mu) / c.sigma;
            (-0.5 * d * d + theta * v, v)
        })
        .collect();
    let top = logs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for &(l, v) in &logs {
        let w = (l - top).exp();
        s0 += w;
        s1 += w * v;
    }
    let mean = s1 / s0;
    let mut s2 = 0.0;
    for &(l, v) in &logs {
        let w = (l - top).exp();
        s2 += w * (v - mean) * (v - mean);
    }
    Tilted {
        ln_m: top + s0.ln() + grid.step.ln() - c.sigma.ln() - LN_SQRT_2PI,
        mean,
        var: s2 / s0,
    }
}

/// The sum `S = Σ V_i`, grouped into distinct components.
#[derive(Debug, Clone)]
pub(crate) struct LineProblem {
    pub comps: Vec<Component>,
}

/// Cumulant generating function of `S` and its first two derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cumulants {
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
}

impl LineProblem {
    pub fn new(p: &SumProblem) -> Self {
        let mut comps: Vec<Component> = Vec::new();
        for g in p.components() {
            match comps
                .iter_mut()
                .find(|c| c.mu == g.mu() && c.sigma == g.sigma())
            {
                Some(c) => c.mult += 1,
                None => comps.push(Component::new(*g, p.delta(), 1)),
            }
        }
        Self { comps }
    }

    pub fn cumulants(&self, theta: f64, cfg: &QuadratureConfig) -> Cumulants {
        let mut out = Cumulants { k: 0.0, k1: 0.0, k2: 0.0 };
        for c in &self.comps {
            let t = tilted_moments(c, theta, &c.grid(theta, cfg));
            let m = c.mult as f64;
            out.k += m * t.ln_m;
            out.k1 += m * t.mean;
            out.k2 += m * t.var;
        }
        out
    }

    /// Solves `K'(θ) = c` for the exponential tilt.
    pub fn saddle(&self, c: f64, cfg: &QuadratureConfig) -> f64 {
        let k1 = |t: f64| self.cumulants(t, cfg).k1;
        let at0 = self.cumulants(0.0, cfg);
        if (at0.k1 - c).abs() < 1e-12 * c.abs().max(1.0) {
            return 0.0;
        }
        let (mut lo, mut hi);
        if c < at0.k1 {
            hi = 0.0;
            lo = -1.0 / at0.k2.sqrt().max(1e-300);
            while k1(lo) > c && lo > -1e300 {
                hi = lo;
                lo *= 4.0;
            }
        } else {
            lo = 0.0;
            hi = 1.0 / at0.k2.sqrt().max(1e-300);
            while k1(hi) < c && hi < 1e300 {
                lo = hi;
                hi *= 4.0;
            }
        }
        // Bisection in a log-ish scale: the root can sit anywhere in a wide bracket.
        for _ in 0..200 {
            let mid = if lo < 0.0 && hi < 0.0 && hi / lo < 0.25 {
                -((-lo).sqrt() * (-hi).sqrt())
            } else if lo > 0.0 && hi > 0.0 && lo / hi < 0.25 {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if k1(mid) < c {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= 1e-6 * hi.abs().max(lo.abs()).max(1e-3) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Samples `R(β) = Π M_i(θ+iβ)^{m_i} / M_i(θ)^{m_i}` at `β_k = k·h`.
    ///
    /// With `beta_max = None` the sequence is extended block by block until
    /// every `|R|` in a block falls below `tol`.
    pub fn spectrum(
        &self,
        theta: f64,
        h: f64,
        sign: f64,
        tol: f64,
        cfg: &QuadratureConfig,
    ) -> Result<Spectrum> {
        let grids: Vec<UGrid> = self.comps.iter().map(|c| c.grid(theta, cfg)).collect();
        let ln_m: Vec<f64> = self
            .comps
            .iter()
            .zip(&grids)
            .map(|(c, g)| tilted_moments(c, theta, g).ln_m)
            .collect();
        let limit = match cfg.beta_max {
            Some(b) => ((b / h).ceil() as usize + 1).min(cfg.max_terms),
            None => cfg.max_terms,
        };
        let mut values: Vec<Complex64> = Vec::new();
        let mut block = 8usize;
        let mut coef: Vec<Complex64> = Vec::new();
        let mut ratio: Vec<Complex64> = Vec::new();
        let mut last_block_max;
        loop {
            let k0 = values.len();
            let len = block.min(limit - k0);
            let beta0 = sign * k0 as f64 * h;
            let mut block_vals = vec![Complex64::new(1.0, 0.0); len];
            for ((c, g), &lm) in self.comps.iter().zip(&grids).zip(&ln_m) {
                let y = c.height(theta, beta0);
                let s0 = Complex64::new(theta, beta0);
                let dh = Complex64::new(0.0, sign * h);
                coef.clear();
                ratio.clear();
                let ln_step = g.step.ln() - lm;
                for i in 0..g.count {
                    let z = Complex64::new(g.node(i), y);
                    let v = c.v_complex(z);
                    let e = c.ln_density(z) + s0 * v + ln_step;
                    if e.re < PRUNE.ln() {
                        continue;
                    }
                    coef.push(e.exp());
                    ratio.push((dh * v).exp());
                }
                for slot in block_vals.iter_mut() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (a, r) in coef.iter_mut().zip(&ratio) {
                        acc += *a;
                        *a *= *r;
                    }
                    *slot *= if c.mult == 1 { acc } else { acc.powi(c.mult) };
                }
            }
            last_block_max = block_vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
            values.extend_from_slice(&block_vals);
            if values.len() >= limit {
                if cfg.beta_max.is_none() && last_block_max >= tol {
                    return Err(Error::NumericFailure {
                        what: format!(
                            "transform decay (|R| still {:.1e} at beta {:.3e})",
                            last_block_max,
                            values.len() as f64 * h
                        ),
                        error_estimate: last_block_max,
                    });
                }
                break;
            }
            if cfg.beta_max.is_none() && k0 > 0 && last_block_max < tol {
                break;
            }
            block = (block * 2).min(cfg.block_len);
        }
        Ok(Spectrum { values, h })
    }
}

/// Samples of the normalised product transform on `β ≥ 0` (or `β ≤ 0`).
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    pub values: Vec<Complex64>,
    pub h: f64,
}

/// Which line integral to accumulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kernel {
    /// `(1/2π)∫ R e^{-iβc} dβ`, the tilted density.
    Density,
    /// `(1/2π)∫ R e^{-iβc} / (θ+iβ) dβ` with the sign that yields a
    /// non-negative tail probability.
    Tail,
}

impl Spectrum {
    pub fn beta_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.h
    }

    /// Trapezoid sum `(h/π) Σ' w_k Re[R_k e^{-iβ_k c} K(β_k)]` and the
    /// magnitude of the last block's contribution.
    pub fn line_sum(&self, c: f64, theta: f64, kernel: Kernel, filter: bool) -> (f64, f64) {
        let n = self.values.len();
        let b = self.beta_max().max(self.h);
        let step = Complex64::from_polar(1.0, -self.h * c);
        let mut e = Complex64::new(1.0, 0.0);
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut tail = 0.0;
        let tail_from = n.saturating_sub(n / 8 + 1);
        for (k, r) in self.values.iter().enumerate() {
            if k % 256 == 0 {
                e = Complex64::from_polar(1.0, -(k as f64) * self.h * c);
            }
            let beta = k as f64 * self.h;
            let mut term = *r * e;
            if kernel == Kernel::Tail {
                term /= Complex64::new(theta.abs(), beta * theta.signum());
            }
            let mut w = if k == 0 { 0.5 } else { 1.0 };
            if filter {
                let q = beta / b;
                let q2 = q * q;
                let q4 = q2 * q2;
                w *= (-36.0 * q4 * q4).exp();
            }
            let t = w * term.re;
            if k >= tail_from {
                tail += t.abs();
            }
            // Neumaier summation
            let s = sum + t;
            comp += if sum.abs() >= t.abs() {
                (sum - s) + t
            } else {
                (t - s) + sum
            };
            sum = s;
            e *= step;
        }
        let scale = self.h / PI;
        ((sum + comp) * scale, tail * scale)
    }
}
