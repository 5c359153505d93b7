//! Monte-Carlo reference for the CDF of `S_N` and for the SIR outage
//! probability.
//!
//! Samples are generated in fixed-size batches. Batch `b` draws from a
//! ChaCha20 stream selected by `b`, so results depend only on the inputs and
//! the seed, never on the number of worker threads.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{clt_ccdf, farley_ccdf, gauss_hermite_rule};
use crate::bound::tm_bound_cdf;
use crate::error::{domain, invalid, Error, Result};
use crate::lognormal::{GaussianParams, SumProblem};
use crate::mellin::QuadratureConfig;
use crate::normal::{inverse_normal_cdf, normal_cdf};

/// Identifies the generator and variate transform; written into output
/// metadata so that stored fixtures can be traced to the stream that made
/// them.
pub const RNG_ALGORITHM: &str =
    "ChaCha20 (rand_chacha 0.9), seed_from_u64(seed), stream = batch index, 52-bit midpoint uniforms, normals by inverse CDF";

/// Sample budget and reproducibility settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MCConfig {
    pub samples: u64,
    pub seed: u64,
    /// Samples per RNG stream.
    pub batch: u64,
}

impl Default for MCConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 1,
            batch: 1 << 16,
        }
    }
}

impl MCConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(invalid("samples must be at least 1"));
        }
        if self.batch == 0 {
            return Err(invalid("batch must be at least 1"));
        }
        Ok(())
    }

    fn batches(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> + '_ {
        let count = usize::try_from(self.samples.div_ceil(self.batch)).expect("batch count fits usize");
        (0..count).into_par_iter().map(move |b| {
            let b = b as u64;
            let len = self.batch.min(self.samples - b * self.batch);
            (b, len)
        })
    }
}

/// Maps the top 52 bits to the midpoint of one of `2^52` equal cells, which
/// is exactly representable and strictly inside `(0, 1)`.
fn unit_midpoint(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Standard normal variates from one ChaCha20 stream.
struct NormalStream(ChaCha20Rng);

impl NormalStream {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    fn next(&mut self) -> f64 {
        let u = unit_midpoint(self.0.next_u64());
        inverse_normal_cdf(u)
    }

    fn sum_sample(&mut self, comps: &[GaussianParams]) -> f64 {
        comps
            .iter()
            .map(|p| (p.mu() + p.sigma() * self.next()).exp())
            .sum()
    }
}

/// Empirical CDF of `S_N` on a grid, with binomial standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCurve {
    pub gammas: Vec<f64>,
    pub cdf: Vec<f64>,
    /// `(samples - count)/samples`, kept separately so small tail values are
    /// not computed as `1 - cdf`.
    pub ccdf: Vec<f64>,
    /// `√(p(1 - p)/samples)`.
    pub stderr: Vec<f64>,
    pub samples: u64,
}

fn binomial_stderr(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn check_sorted(gammas: &[f64]) -> Result<()> {
    if gammas.iter().any(|g| g.is_nan()) {
        return Err(invalid("gamma grid contains NaN"));
    }
    if gammas.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("gamma grid must be sorted ascending"));
    }
    Ok(())
}

/// Simulates `S_N = Σ e^{X_i}` for the components of `problem` (its shift is
/// ignored) and counts the fraction of samples `≤ γ` at each grid point.
///
/// ```
/// use lognsum::{montecarlo::{empirical_cdf, MCConfig}, GaussianParams, SumProblem};
/// let p = SumProblem::uniform(1, GaussianParams::new(0.0, 1.0)?, 0.0)?;
/// let c = empirical_cdf(&p, &[1.0], &MCConfig::new(20_000, 7))?;
/// assert!((c.cdf[0] - 0.5).abs() < 4.0 * c.stderr[0]);
/// # Ok::<(), lognsum::Error>(())
/// ```
pub fn empirical_cdf(problem: &SumProblem, gammas: &[f64], mc: &MCConfig) -> Result<EmpiricalCurve> {
    mc.validate()?;
    check_sorted(gammas)?;
    let comps = problem.components();
    let m = gammas.len();
    // hist[j] counts samples s with gammas[j-1] < s ≤ gammas[j]; hist[m] the rest
    let per_batch: Vec<Vec<u64>> = mc
        .batches()
        .map(|(b, len)| {
            let mut rng = NormalStream::new(mc.seed, b);
            let mut hist = vec![0u64; m + 1];
            for _ in 0..len {
                let s = rng.sum_sample(comps);
                hist[gammas.partition_point(|&g| g < s)] += 1;
            }
            hist
        })
        .collect();
    let mut hist = vec![0u64; m + 1];
    for h in &per_batch {
        for (t, v) in hist.iter_mut().zip(h) {
            *t += v;
        }
    }
    let n = mc.samples;
    let mut below = 0u64;
    let mut cdf = Vec::with_capacity(m);
    let mut ccdf = Vec::with_capacity(m);
    let mut stderr = Vec::with_capacity(m);
    for &h in &hist[..m] {
        below += h;
        let p = below as f64 / n as f64;
        cdf.push(p);
        ccdf.push((n - below) as f64 / n as f64);
        stderr.push(binomial_stderr(p, n));
    }
    Ok(EmpiricalCurve {
        gammas: gammas.to_vec(),
        cdf,
        ccdf,
        stderr,
        samples: n,
    })
}

/// How the desired-signal log-power `X₀` enters the outage probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalModel {
    /// `X₀ ~ N(μ₀, σ₀²)` is averaged over.
    Marginalized(GaussianParams),
    /// `X₀ = x₀` is held fixed, i.e. the outage probability conditional on
    /// the signal power.
    Fixed(f64),
}

/// Estimator for `Pr[e^{X₀} / Σ e^{X_i} ≤ γ_th]`.
#[derive(Debug, Clone, PartialEq)]
pub enum OutageMethod {
    /// Joint simulation of signal and interferers, counting SIR ≤ γ_th.
    Mc,
    /// Simulation of the interference only, with the signal integrated out
    /// exactly: the mean of `Pr[e^{X₀} ≤ γ_th S] = Φ((ln(γ_th S) - μ₀)/σ₀)`.
    /// Estimates the same quantity as [`OutageMethod::Mc`] through
    /// `E[1 - F_S(e^{X₀}/γ_th)]` with smaller variance.
    McConditional,
    /// `1 - F_S` replaced by `1 - tm_bound_cdf`, a lower bound on the outage.
    Bound {
        delta: f64,
        quadrature: QuadratureConfig,
    },
    /// `1 - F_S` from the large-`N` CLT form. Needs identical interferers.
    Clt { delta: f64, order: usize },
    /// `1 - F_S` from Farley's lower bound on the CCDF. Needs identical
    /// interferers.
    Farley,
}

/// Outage probability with a standard error for the simulation methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub probability: f64,
    pub stderr: Option<f64>,
}

/// Order of the Gauss–Hermite rule that averages analytic CCDFs over `X₀`.
pub const SIGNAL_RULE_ORDER: usize = 64;

/// `Pr[e^{X₀}/Σe^{X_i} ≤ γ_th] = E[1 - F_{S_N}(e^{X₀}/γ_th)]`.
///
/// Analytic methods evaluate `1 - F_{S_N}` at `e^{x}/γ_th` for the fixed
/// signal level, or at the Gauss–Hermite nodes of the signal density when it
/// is marginalized.
pub fn outage_probability(
    signal: SignalModel,
    interferers: &[GaussianParams],
    gamma_th: f64,
    method: &OutageMethod,
    mc: &MCConfig,
) -> Result<OutageEstimate> {
    if gamma_th.is_nan() || gamma_th <= 0.0 {
        return Err(domain(format!("gamma_th must be positive, got {gamma_th}")));
    }
    if interferers.is_empty() {
        return Err(invalid("at least one interferer is required"));
    }
    if let SignalModel::Fixed(x) = signal {
        if !x.is_finite() {
            return Err(invalid(format!("fixed signal level must be finite, got {x}")));
        }
    }
    if gamma_th == f64::INFINITY {
        return Ok(OutageEstimate {
            probability: 1.0,
            stderr: Some(0.0).filter(|_| is_simulation(method)),
        });
    }
    match method {
        OutageMethod::Mc => outage_joint(signal, interferers, gamma_th, mc),
        OutageMethod::McConditional => outage_conditional(signal, interferers, gamma_th, mc),
        OutageMethod::Bound { delta, quadrature } => {
            let problem = SumProblem::new(interferers.to_vec(), *delta)?;
            average_over_signal(signal, gamma_th, |t| {
                Ok(tm_bound_cdf(t, &problem, quadrature)?.complement)
            })
        }
        OutageMethod::Clt { delta, order } => {
            let p = uniform(interferers, "clt")?;
            let n = interferers.len();
            average_over_signal(signal, gamma_th, |t| clt_ccdf(t, p, *delta, n, *order))
        }
        OutageMethod::Farley => {
            let p = uniform(interferers, "farley")?;
            let n = interferers.len();
            average_over_signal(signal, gamma_th, |t| {
                if t == 0.0 {
                    Ok(1.0)
                } else {
                    farley_ccdf(t, p, n)
                }
            })
        }
    }
}

fn is_simulation(m: &OutageMethod) -> bool {
    matches!(m, OutageMethod::Mc | OutageMethod::McConditional)
}

fn uniform(interferers: &[GaussianParams], name: &str) -> Result<GaussianParams> {
    let first = interferers[0];
    if interferers.iter().any(|p| *p != first) {
        return Err(Error::Unsupported(format!(
            "the {name} method needs identically distributed interferers"
        )));
    }
    Ok(first)
}

fn average_over_signal(
    signal: SignalModel,
    gamma_th: f64,
    ccdf: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<OutageEstimate> {
    let lg = gamma_th.ln();
    let at = |x: f64| ccdf((x - lg).exp());
    let probability = match signal {
        SignalModel::Fixed(x) => at(x)?,
        SignalModel::Marginalized(p) => {
            let rule = gauss_hermite_rule(SIGNAL_RULE_ORDER)?;
            let s = std::f64::consts::SQRT_2 * p.sigma();
            let vals: Vec<f64> = rule
                .nodes()
                .par_iter()
                .map(|&x| at(s * x + p.mu()))
                .collect::<Result<_>>()?;
            let sum: f64 = vals.iter().zip(rule.weights()).map(|(v, w)| v * w).sum();
            sum / std::f64::consts::PI.sqrt()
        }
    };
    Ok(OutageEstimate {
        probability: probability.clamp(0.0, 1.0),
        stderr: None,
    })
}

fn outage_joint(
    signal: SignalModel,
    interferers: &[GaussianParams],
    gamma_th: f64,
    mc: &MCConfig,
) -> Result<OutageEstimate> {
    mc.validate()?;
    let hits: u64 = mc
        .batches()
        .map(|(b, len)| {
            let mut rng = NormalStream::new(mc.seed, b);
            let mut hits = 0u64;
            for _ in 0..len {
                let x0 = match signal {
                    SignalModel::Fixed(x) => x,
                    SignalModel::Marginalized(p) => p.mu() + p.sigma() * rng.next(),
                };
                let s = rng.sum_sample(interferers);
                if x0.exp() <= gamma_th * s {
                    hits += 1;
                }
            }
            hits
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let p = hits as f64 / mc.samples as f64;
    Ok(OutageEstimate {
        probability: p,
        stderr: Some(binomial_stderr(p, mc.samples)),
    })
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

fn outage_conditional(
    signal: SignalModel,
    interferers: &[GaussianParams],
    gamma_th: f64,
    mc: &MCConfig,
) -> Result<OutageEstimate> {
    mc.validate()?;
    let lg = gamma_th.ln();
    let h = |s: f64| -> f64 {
        let lhs = lg + s.ln();
        match signal {
            SignalModel::Fixed(x) => f64::from(x <= lhs),
            SignalModel::Marginalized(p) => normal_cdf((lhs - p.mu()) / p.sigma()),
        }
    };
    let parts: Vec<(Compensated, Compensated)> = mc
        .batches()
        .map(|(b, len)| {
            let mut rng = NormalStream::new(mc.seed, b);
            let (mut s1, mut s2) = (Compensated::default(), Compensated::default());
            for _ in 0..len {
                let v = h(rng.sum_sample(interferers));
                s1.add(v);
                s2.add(v * v);
            }
            (s1, s2)
        })
        .collect();
    let (mut s1, mut s2) = (Compensated::default(), Compensated::default());
    for (a, b) in &parts {
        s1.add(a.value());
        s2.add(b.value());
    }
    let n = mc.samples as f64;
    let mean = s1.value() / n;
    let var = if mc.samples > 1 {
        ((s2.value() - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(OutageEstimate {
        probability: mean,
        stderr: Some((var / n).sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(mu: f64, sigma: f64) -> GaussianParams {
        GaussianParams::new(mu, sigma).unwrap()
    }

    #[test]
    fn batches_cover_samples_exactly() {
        let mc = MCConfig {
            samples: 1000,
            seed: 0,
            batch: 300,
        };
        let b: Vec<_> = mc.batches().collect();
        assert_eq!(b, vec![(0, 300), (1, 300), (2, 300), (3, 100)]);
    }

    #[test]
    fn uniforms_stay_inside_unit_interval() {
        let lo = unit_midpoint(0);
        let hi = unit_midpoint(u64::MAX);
        assert!(lo > 0.0 && hi < 1.0);
        assert_eq!(lo, 1.0 - hi);
        assert!(inverse_normal_cdf(lo).is_finite() && inverse_normal_cdf(hi).is_finite());
    }

    #[test]
    fn streams_differ() {
        let mut a = NormalStream::new(5, 0);
        let mut b = NormalStream::new(5, 1);
        assert_ne!(a.next(), b.next());
    }

    #[test]
    fn rejects_unsorted_grid_and_empty_budget() {
        let prob = SumProblem::uniform(2, p(0.0, 1.0), 0.0).unwrap();
        assert!(empirical_cdf(&prob, &[2.0, 1.0], &MCConfig::default()).is_err());
        assert!(empirical_cdf(&prob, &[1.0], &MCConfig::new(0, 1)).is_err());
    }

    #[test]
    fn clt_and_farley_need_uniform_interferers() {
        let mixed = [p(0.0, 1.0), p(0.0, 2.0)];
        let sig = SignalModel::Fixed(0.0);
        let mc = MCConfig::default();
        for m in [OutageMethod::Farley, OutageMethod::Clt { delta: 10.0, order: 20 }] {
            assert!(matches!(
                outage_probability(sig, &mixed, 1.0, &m, &mc),
                Err(Error::Unsupported(_))
            ));
        }
    }
}
