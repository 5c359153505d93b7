use lognsum::{
    approx_recursive, clt_cdf, empirical_cdf, farley_ccdf, gm_bound_cdf, left_tail_cdf,
    mellin_convolution_pdf, tm_bound_cdf, DistributionCurve, Error, GaussianParams, MCConfig,
    QuadratureConfig, SumProblem,
};
use rayon::prelude::*;

use crate::config::{ConfigError, Method, Quantity, RunConfig};

/// A grid point whose value could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct RowFailure {
    pub column: String,
    pub gamma: f64,
    pub error: Error,
}

/// A finished table plus the rows that were replaced by `nan`.
#[derive(Debug, Default)]
pub struct Evaluated {
    pub curve: DistributionCurve,
    pub failures: Vec<RowFailure>,
}

impl Evaluated {
    pub fn new(gammas: Vec<f64>) -> Self {
        Self {
            curve: DistributionCurve::new(gammas),
            failures: Vec::new(),
        }
    }

    /// Evaluates `f` at every grid point in parallel; failures become `nan`.
    pub fn column(&mut self, name: &str, f: impl Fn(f64) -> lognsum::Result<f64> + Sync) {
        let results: Vec<lognsum::Result<f64>> = self.curve.gammas.par_iter().map(|&g| f(g)).collect();
        let mut values = Vec::with_capacity(results.len());
        for (r, &gamma) in results.into_iter().zip(&self.curve.gammas) {
            match r {
                Ok(v) => values.push(v),
                Err(error) => {
                    values.push(f64::NAN);
                    self.failures.push(RowFailure {
                        column: name.to_string(),
                        gamma,
                        error,
                    });
                }
            }
        }
        self.curve.push(name, values, None).expect("one value per grid point");
    }

    /// Adds a Monte-Carlo column with its standard errors.
    pub fn simulated(&mut self, name: &str, problem: &SumProblem, mc: &MCConfig, quantity: Quantity) {
        let n = self.curve.gammas.len();
        match empirical_cdf(problem, &self.curve.gammas, mc) {
            Ok(e) => {
                let values = match quantity {
                    Quantity::Cdf => e.cdf,
                    Quantity::Ccdf => e.ccdf,
                };
                self.curve.push(name, values, Some(e.stderr)).expect("grid length");
            }
            Err(error) => {
                for &gamma in &self.curve.gammas {
                    self.failures.push(RowFailure {
                        column: name.to_string(),
                        gamma,
                        error: error.clone(),
                    });
                }
                self.curve
                    .push(name, vec![f64::NAN; n], Some(vec![f64::NAN; n]))
                    .expect("grid length");
            }
        }
    }
}

/// The value of one analytic method at one threshold, as CDF or CCDF.
///
/// `mellin_conv` is a density and ignores `quantity`.
#[allow(clippy::too_many_arguments)]
pub fn analytic(
    method: Method,
    gamma: f64,
    q: GaussianParams,
    n: usize,
    delta: f64,
    gh_order: usize,
    quantity: Quantity,
    cfg: &QuadratureConfig,
) -> lognsum::Result<f64> {
    let params = vec![q; n];
    let pick = |cdf: f64, ccdf: f64| match quantity {
        Quantity::Cdf => cdf,
        Quantity::Ccdf => ccdf,
    };
    Ok(match method {
        Method::TmBound => {
            let b = tm_bound_cdf(gamma, &SumProblem::uniform(n, q, delta)?, cfg)?;
            pick(b.value, b.complement)
        }
        Method::GmBound => {
            let v = gm_bound_cdf(gamma, &params)?;
            pick(v, 1.0 - v)
        }
        Method::LeftTail => {
            let v = left_tail_cdf(gamma, &params)?;
            pick(v, 1.0 - v)
        }
        Method::Farley => {
            let v = farley_ccdf(gamma, q, n)?;
            pick(1.0 - v, v)
        }
        Method::Approx2 | Method::ApproxRec => {
            let v = approx_recursive(gamma, q, n)?;
            pick(v, 1.0 - v)
        }
        Method::Clt => {
            let v = clt_cdf(gamma, q, delta, n, gh_order)?;
            pick(v, 1.0 - v)
        }
        Method::MellinConv => mellin_convolution_pdf(gamma, &SumProblem::uniform(n, q, delta)?, cfg)?,
        Method::Mc => unreachable!("simulated separately"),
    })
}

/// Evaluates a validated run configuration.
pub fn evaluate(c: &RunConfig) -> Result<Evaluated, ConfigError> {
    let method = c.method()?;
    let q = c.params()?;
    let mut out = Evaluated::new(c.gamma_grid()?.values());
    let name = method.name();
    if method == Method::Mc {
        let problem = SumProblem::uniform(c.n, q, 0.0).map_err(|e| ConfigError(e.to_string()))?;
        out.simulated(name, &problem, &c.mc, c.quantity);
    } else {
        let delta = c.delta.unwrap_or(0.0);
        out.column(name, |g| {
            analytic(method, g, q, c.n, delta, c.gh_order, c.quantity, &c.quadrature)
        });
    }
    Ok(out)
}
