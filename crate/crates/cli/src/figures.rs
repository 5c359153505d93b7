use std::path::{Path, PathBuf};

use lognsum::{
    clt_ccdf, empirical_cdf, exact_cdf_two, mellin_transform, x0_solve, ComplexAbscissa, Error,
    GammaGrid, GaussianParams, MCConfig, QuadratureConfig, ShiftedLognormal, SumProblem,
};
use rayon::prelude::*;

use crate::config::{Method, Quantity};
use crate::methods::{analytic, Evaluated, RowFailure};
use crate::output::Table;

/// Settings shared by all figure presets.
#[derive(Debug, Clone)]
pub struct FigureOptions {
    /// Points per threshold grid.
    pub points: usize,
    pub mc: MCConfig,
    pub quadrature: QuadratureConfig,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            points: 200,
            mc: MCConfig::default(),
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// What a preset produced.
#[derive(Debug, Default)]
pub struct FigureReport {
    pub files: Vec<PathBuf>,
    /// Curves that were skipped or data that does not exist, for the user.
    pub notices: Vec<String>,
    pub failures: Vec<RowFailure>,
}

struct Writer<'a> {
    id: u32,
    dir: &'a Path,
    opts: &'a FigureOptions,
    report: FigureReport,
}

fn unit(mu: f64, sigma: f64) -> GaussianParams {
    GaussianParams::new(mu, sigma).expect("preset parameters are valid")
}

fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    GammaGrid::new(min, max, points, true)
        .expect("preset grids are valid")
        .values()
}

/// Short decimal form for file and column names: 0.5, 1, 10.
fn tag(v: f64) -> String {
    format!("{v}")
}

impl Writer<'_> {
    fn metadata(&self, caption: &str, uses_mc: bool) -> Vec<String> {
        let mut m = vec![
            format!("figure {}: {caption}", self.id),
            format!("lognsum {}", lognsum::VERSION),
            format!(
                "quadrature {}",
                serde_json::to_string(&self.opts.quadrature).expect("serialisable")
            ),
        ];
        if uses_mc {
            m.push(format!("rng {}", lognsum::RNG_ALGORITHM));
            m.push(format!(
                "mc {}",
                serde_json::to_string(&self.opts.mc).expect("serialisable")
            ));
            m.push(format!("seed {}", self.opts.mc.seed));
        }
        m
    }

    fn emit(&mut self, name: &str, table: Table) -> std::io::Result<()> {
        let path = self.dir.join(name);
        table.write_file(&path)?;
        self.report.files.push(path);
        Ok(())
    }

    fn emit_curve(&mut self, name: &str, caption: &str, e: Evaluated, uses_mc: bool) -> std::io::Result<()> {
        let table = Table::from_curve(&e.curve, self.metadata(caption, uses_mc));
        self.report.failures.extend(e.failures);
        self.emit(name, table)
    }

    fn notice(&mut self, msg: impl Into<String>) {
        self.report.notices.push(msg.into());
    }

    fn sum_problem(&self, n: usize, q: GaussianParams) -> SumProblem {
        SumProblem::uniform(n, q, 0.0).expect("preset parameters are valid")
    }

    fn analytic_column(&self, e: &mut Evaluated, name: &str, method: Method, q: GaussianParams, n: usize, delta: f64, quantity: Quantity) {
        let cfg = self.opts.quadrature;
        e.column(name, |g| analytic(method, g, q, n, delta, 20, quantity, &cfg));
    }
}

/// Writes every curve of figure `id` as CSV files under `dir`.
pub fn figure(id: u32, dir: &Path, opts: &FigureOptions) -> Result<FigureReport, Error> {
    if !(1..=8).contains(&id) {
        return Err(Error::InvalidParameter(format!("figure must be 1 to 8, got {id}")));
    }
    let mut w = Writer {
        id,
        dir,
        opts,
        report: FigureReport::default(),
    };
    let io = |e: std::io::Error| Error::InvalidParameter(format!("cannot write to {}: {e}", dir.display()));
    match id {
        1 => transform_panels(&mut w).map_err(io)?,
        2 => left_tail(&mut w).map_err(io)?,
        3 | 4 | 5 => bound_curves(&mut w).map_err(io)?,
        6 | 7 => approximations(&mut w).map_err(io)?,
        _ => large_n(&mut w).map_err(io)?,
    }
    Ok(w.report)
}

fn transform_panels(w: &mut Writer) -> std::io::Result<()> {
    let cfg = w.opts.quadrature;
    let betas: Vec<f64> = (0..=400).map(|k| k as f64 * 0.05).collect();
    for delta in [2.0, 10.0] {
        for sigma in [1.0, 2.0] {
            let d = ShiftedLognormal::new(unit(0.0, sigma), delta).expect("valid preset");
            let vals: Vec<Result<(f64, f64), Error>> = betas
                .par_iter()
                .map(|&b| {
                    let s = ComplexAbscissa::new(1.0, b)?;
                    mellin_transform(&d, s, &cfg).map(|v| (v.re, v.im))
                })
                .collect();
            let mut rows = Vec::with_capacity(betas.len());
            for (&b, v) in betas.iter().zip(vals) {
                let (re, im) = v.unwrap_or_else(|error| {
                    w.report.failures.push(RowFailure {
                        column: format!("phi delta={delta} sigma={sigma}"),
                        gamma: b,
                        error,
                    });
                    (f64::NAN, f64::NAN)
                });
                rows.push(vec![b, re, im]);
            }
            let caption = format!("Mellin transform at alpha=1, delta={delta}, sigma={sigma}, mu=0");
            let table = Table {
                metadata: w.metadata(&caption, false),
                header: vec!["beta".into(), "re".into(), "im".into()],
                rows,
            };
            w.emit(&format!("fig1_delta{}_sigma{}.csv", tag(delta), tag(sigma)), table)?;
        }
    }
    Ok(())
}

fn left_tail(w: &mut Writer) -> std::io::Result<()> {
    let q = unit(0.0, 1.0);
    let mut e = Evaluated::new(log_grid(0.01, 10.0, w.opts.points));
    e.column("cdf_numerical", |g| exact_cdf_two(g, q, q));
    w.analytic_column(&mut e, "left_tail", Method::LeftTail, q, 2, 0.0, Quantity::Cdf);
    w.notice("figure 2: the Marcum-Q lower bound for N=2 is out of scope and was skipped");
    w.emit_curve("fig2.csv", "CDF by numerical integration and lognormal left-tail approximation, N=2, sigma=1, mu=0", e, false)
}

fn bound_curves(w: &mut Writer) -> std::io::Result<()> {
    let (sigma, quantity) = match w.id {
        3 => (1.0, Quantity::Ccdf),
        4 => (2.0, Quantity::Ccdf),
        _ => (1.0, Quantity::Cdf),
    };
    let q = unit(0.0, sigma);
    for n in [2usize, 6] {
        let nf = n as f64;
        let grid = match quantity {
            Quantity::Ccdf => log_grid(nf * (-2.5 * sigma).exp(), nf * (3.5 * sigma).exp(), w.opts.points),
            Quantity::Cdf => log_grid(nf * (-4.0 * sigma).exp(), nf * sigma.exp(), w.opts.points),
        };
        let mut e = Evaluated::new(grid);
        for delta in [10.0, 100.0] {
            let name = format!("tm_bound_delta{}", tag(delta));
            w.analytic_column(&mut e, &name, Method::TmBound, q, n, delta, quantity);
        }
        w.analytic_column(&mut e, "farley", Method::Farley, q, n, 0.0, quantity);
        e.simulated("mc", &w.sum_problem(n, q), &w.opts.mc, quantity);
        if n == 6 {
            w.notice(format!(
                "figure {}: the improved order-statistics integral bound for N=6 is out of scope and was skipped",
                w.id
            ));
        }
        let what = match quantity {
            Quantity::Ccdf => "CCDF",
            Quantity::Cdf => "CDF",
        };
        let caption = format!("{what} of the tangential-mean bound, delta in {{10, 100}}, N={n}, sigma={sigma}, mu=0");
        let file = format!("fig{}_n{n}.csv", w.id);
        w.emit_curve(&file, &caption, e, true)?;
    }
    Ok(())
}

fn approximations(w: &mut Writer) -> std::io::Result<()> {
    let n = if w.id == 6 { 2 } else { 3 };
    let method = if n == 2 { Method::Approx2 } else { Method::ApproxRec };
    for sigma in [0.5, 1.0, 2.0] {
        let q = unit(0.0, sigma);
        let nf = n as f64;
        let mut e = Evaluated::new(log_grid(nf * (-2.0 * sigma).exp(), nf * (3.5 * sigma).exp(), w.opts.points));
        w.analytic_column(&mut e, method.name(), method, q, n, 0.0, Quantity::Ccdf);
        w.analytic_column(&mut e, "farley", Method::Farley, q, n, 0.0, Quantity::Ccdf);
        e.simulated("mc", &w.sum_problem(n, q), &w.opts.mc, Quantity::Ccdf);
        let caption = format!("CCDF of the Q-function approximation, N={n}, sigma={sigma}, mu=0");
        w.emit_curve(&format!("fig{}_sigma{}.csv", w.id, tag(sigma)), &caption, e, true)?;
    }
    if n == 2 {
        // inset: ε = ln γ - x₀, undefined where the root does not exist
        let mut e = Evaluated::new(log_grid(0.1, 1000.0, w.opts.points));
        let mut missing = 0;
        for sigma in [0.5, 1.0, 2.0] {
            let q = unit(0.0, sigma);
            let eps: Vec<Option<f64>> = e
                .curve
                .gammas
                .par_iter()
                .map(|&g| x0_solve(g, q).ok().map(|r| r.epsilon))
                .collect();
            missing += eps.iter().filter(|v| v.is_none()).count();
            let values = eps.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
            e.curve
                .push(format!("epsilon_sigma{}", tag(sigma)), values, None)
                .expect("grid length");
        }
        if missing > 0 {
            w.notice(format!("figure 6: epsilon has no root at {missing} grid points (written as nan)"));
        }
        w.emit_curve("fig6_epsilon.csv", "epsilon = ln(gamma) - x0, N=2, mu=0", e, false)?;
    } else {
        // inset: zoom on the small-γ crossing for σ = 0.5
        let q = unit(0.0, 0.5);
        let mut e = Evaluated::new(log_grid(0.8, 6.0, w.opts.points));
        w.analytic_column(&mut e, method.name(), method, q, n, 0.0, Quantity::Ccdf);
        e.simulated("mc", &w.sum_problem(n, q), &w.opts.mc, Quantity::Ccdf);
        w.emit_curve("fig7_zoom_sigma0.5.csv", "zoom at small gamma, N=3, sigma=0.5, mu=0", e, true)?;
    }
    Ok(())
}

fn large_n(w: &mut Writer) -> std::io::Result<()> {
    let n = 30;
    let q = unit(0.0, 1.0);
    let mut e = Evaluated::new(log_grid(15.0, 300.0, w.opts.points));
    for delta in [10.0, 100.0] {
        let name = format!("clt_delta{}", tag(delta));
        w.analytic_column(&mut e, &name, Method::Clt, q, n, delta, Quantity::Ccdf);
    }
    w.analytic_column(&mut e, "farley", Method::Farley, q, n, 0.0, Quantity::Ccdf);
    let problem = w.sum_problem(n, q);
    e.simulated("mc", &problem, &w.opts.mc, Quantity::Ccdf);
    w.emit_curve("fig8.csv", "CCDF of the large-N approximation, delta in {10, 100}, N=30, sigma=1, mu=0", e, true)?;

    // inset: the approximation at γ = 70 as a function of δ, and the
    // simulated value it fails to reach
    let deltas: Vec<f64> = (0..w.opts.points).map(|k| 10.0 + 190.0 * k as f64 / (w.opts.points.max(2) - 1) as f64).collect();
    let (mc, se) = match empirical_cdf(&problem, &[70.0], &w.opts.mc) {
        Ok(c) => (c.ccdf[0], c.stderr[0]),
        Err(error) => {
            w.report.failures.push(RowFailure {
                column: "mc_gamma70".into(),
                gamma: 70.0,
                error,
            });
            (f64::NAN, f64::NAN)
        }
    };
    let vals: Vec<Result<f64, Error>> = deltas.par_iter().map(|&d| clt_ccdf(70.0, q, d, n, 20)).collect();
    let mut rows = Vec::with_capacity(deltas.len());
    for (&d, v) in deltas.iter().zip(vals) {
        let v = v.unwrap_or_else(|error| {
            w.report.failures.push(RowFailure {
                column: "clt_gamma70".into(),
                gamma: d,
                error,
            });
            f64::NAN
        });
        rows.push(vec![d, v, mc, se]);
    }
    let table = Table {
        metadata: w.metadata("CCDF at gamma=70 as a function of delta, N=30, sigma=1, mu=0", true),
        header: ["delta", "clt_gamma70", "mc_gamma70", "mc_stderr"].map(String::from).to_vec(),
        rows,
    };
    w.emit("fig8_inset.csv", table)
}
