use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use lognsum::{GammaGrid, GaussianParams, MCConfig, QuadratureConfig};
use serde::{Deserialize, Serialize};

/// Curve-evaluation methods exposed by `lognsum run`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Method {
    TmBound,
    GmBound,
    LeftTail,
    Farley,
    Approx2,
    ApproxRec,
    Clt,
    Mc,
    MellinConv,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TmBound => "tm_bound",
            Method::GmBound => "gm_bound",
            Method::LeftTail => "left_tail",
            Method::Farley => "farley",
            Method::Approx2 => "approx2",
            Method::ApproxRec => "approx_rec",
            Method::Clt => "clt",
            Method::Mc => "mc",
            Method::MellinConv => "mellin_conv",
        }
    }
}

/// Whether distribution columns hold `P(S ≤ γ)` or `P(S > γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Cdf,
    #[default]
    Ccdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            min: 0.1,
            max: 100.0,
            points: 200,
            log: true,
        }
    }
}

/// Everything needed to produce one curve. Mirrors the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub method: Option<Method>,
    pub n: usize,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub mu_db: Option<f64>,
    pub sigma_db: Option<f64>,
    pub delta: Option<f64>,
    pub quantity: Quantity,
    pub grid: GridSpec,
    /// Gauss-Hermite order for the `clt` moments.
    pub gh_order: usize,
    pub quadrature: QuadratureConfig,
    pub mc: MCConfig,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: None,
            n: 2,
            mu: None,
            sigma: None,
            mu_db: None,
            sigma_db: None,
            delta: None,
            quantity: Quantity::default(),
            grid: GridSpec::default(),
            gh_order: 20,
            quadrature: QuadratureConfig::default(),
            mc: MCConfig::default(),
            out: None,
        }
    }
}

/// A configuration problem, naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn field_err(field: &str, msg: impl fmt::Display) -> ConfigError {
    ConfigError(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            ConfigError(format!(
                "{} line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }

    /// Component parameters in natural units, from whichever style was given.
    pub fn params(&self) -> Result<GaussianParams, ConfigError> {
        let natural = self.mu.is_some() || self.sigma.is_some();
        let db = self.mu_db.is_some() || self.sigma_db.is_some();
        match (natural, db) {
            (true, true) => Err(ConfigError(
                "give either mu/sigma or mu_db/sigma_db, not both".into(),
            )),
            (false, false) => Err(field_err("sigma", "missing (or give sigma_db)")),
            (true, false) => {
                let sigma = self.sigma.ok_or_else(|| field_err("sigma", "missing"))?;
                GaussianParams::new(self.mu.unwrap_or(0.0), sigma)
                    .map_err(|e| field_err("sigma", e))
            }
            (false, true) => {
                let sigma = self.sigma_db.ok_or_else(|| field_err("sigma_db", "missing"))?;
                GaussianParams::from_db(self.mu_db.unwrap_or(0.0), sigma)
                    .map_err(|e| field_err("sigma_db", e))
            }
        }
    }

    pub fn method(&self) -> Result<Method, ConfigError> {
        self.method.ok_or_else(|| field_err("method", "missing"))
    }

    pub fn gamma_grid(&self) -> Result<GammaGrid, ConfigError> {
        let g = &self.grid;
        GammaGrid::new(g.min, g.max, g.points, g.log).map_err(|e| field_err("grid", e))
    }

    /// `delta`, which must be present and positive.
    pub fn positive_delta(&self) -> Result<f64, ConfigError> {
        match self.delta {
            Some(d) if d.is_finite() && d > 0.0 => Ok(d),
            Some(d) => Err(field_err("delta", format!("must be positive, got {d}"))),
            None => Err(field_err("delta", format!("required by {}", self.method_name()))),
        }
    }

    fn method_name(&self) -> &'static str {
        self.method.map_or("this method", Method::name)
    }

    /// Checks everything that does not require evaluating the method.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let method = self.method()?;
        self.params()?;
        self.gamma_grid()?;
        if self.n == 0 {
            return Err(field_err("n", "must be at least 1"));
        }
        self.quadrature.validate().map_err(|e| field_err("quadrature", e))?;
        self.mc.validate().map_err(|e| field_err("mc", e))?;
        match method {
            Method::TmBound | Method::Clt => {
                self.positive_delta()?;
            }
            Method::MellinConv => {
                if self.n > 3 {
                    return Err(field_err("n", "mellin_conv supports at most 3 factors"));
                }
                if self.delta.is_some_and(|d| !(d.is_finite() && d >= 0.0)) {
                    return Err(field_err("delta", "must be non-negative"));
                }
            }
            Method::Approx2 if self.n != 2 => {
                return Err(field_err("n", "approx2 is defined for n = 2; use approx_rec"));
            }
            _ => {}
        }
        if method == Method::Clt && !(1..=64).contains(&self.gh_order) {
            return Err(field_err("gh_order", "must be between 1 and 64"));
        }
        Ok(())
    }
}

/// Flags shared by `run` and `figure`; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct QuadratureFlags {
    /// Real part of the inversion line.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fixed truncation of the inversion line (default: adaptive).
    #[arg(long)]
    pub beta_max: Option<f64>,
    /// Samples per unit of beta on the inversion line (default: adaptive).
    #[arg(long)]
    pub beta_density: Option<f64>,
    /// Tolerance for adaptive quadrature.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl QuadratureFlags {
    pub fn apply(&self, q: &mut QuadratureConfig) {
        if let Some(a) = self.alpha {
            q.alpha = a;
        }
        if self.beta_max.is_some() {
            q.beta_max = self.beta_max;
        }
        if self.beta_density.is_some() {
            q.beta_density = self.beta_density;
        }
        if let Some(t) = self.tol {
            q.adaptive_tol = t;
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct McFlags {
    /// Monte-Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Monte-Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl McFlags {
    pub fn apply(&self, mc: &mut MCConfig) {
        if let Some(s) = self.samples {
            mc.samples = s;
        }
        if let Some(s) = self.seed {
            mc.seed = s;
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Number of summands.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_db: Option<f64>,
    #[arg(long)]
    pub sigma_db: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Emit the CDF or the CCDF.
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    #[arg(long)]
    pub gamma_min: Option<f64>,
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Log-spaced grid.
    #[arg(long, overrides_with = "linear_grid")]
    pub log_grid: bool,
    /// Linearly spaced grid.
    #[arg(long)]
    pub linear_grid: bool,
    /// Gauss-Hermite order for `clt`.
    #[arg(long)]
    pub gh_order: Option<usize>,
    #[command(flatten)]
    pub quadrature: QuadratureFlags,
    #[command(flatten)]
    pub mc: McFlags,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunFlags {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if self.mu.is_some() || self.sigma.is_some() {
            c.mu_db = None;
            c.sigma_db = None;
        }
        if self.mu_db.is_some() || self.sigma_db.is_some() {
            c.mu = None;
            c.sigma = None;
        }
        macro_rules! set {
            ($($flag:ident => $field:expr),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { $field = v.into(); })*
            };
        }
        set! {
            method => c.method,
            n => c.n,
            mu => c.mu,
            sigma => c.sigma,
            mu_db => c.mu_db,
            sigma_db => c.sigma_db,
            delta => c.delta,
            quantity => c.quantity,
            gamma_min => c.grid.min,
            gamma_max => c.grid.max,
            points => c.grid.points,
            gh_order => c.gh_order,
            out => c.out,
        }
        if self.log_grid {
            c.grid.log = true;
        }
        if self.linear_grid {
            c.grid.log = false;
        }
        self.quadrature.apply(&mut c.quadrature);
        self.mc.apply(&mut c.mc);
        c.validate()?;
        Ok(c)
    }
}
