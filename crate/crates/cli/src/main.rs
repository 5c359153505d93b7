//! `lognsum`: evaluate lognormal-sum bounds and approximations on a threshold
//! grid, or regenerate the data behind the reference figures.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 when some values
//! could not be computed (those rows hold `nan`).

mod config;
mod figures;
mod methods;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, McFlags, QuadratureFlags, RunFlags};
use figures::FigureOptions;
use methods::RowFailure;
use output::Table;

const CONFIG_ERROR: u8 = 2;
const NUMERIC_FAILURE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "lognsum", version, about = "Bounds and approximations for sums of lognormal random variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one method on a threshold grid and write a CSV curve.
    Run(RunFlags),
    /// Write the curves of one reference figure (1 to 8) as CSV files.
    Figure {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=8))]
        id: u32,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Points per threshold grid.
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[command(flatten)]
        quadrature: QuadratureFlags,
        #[command(flatten)]
        mc: McFlags,
    },
}

/// Applies `LOGNSUM_THREADS` to the global worker pool.
fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("LOGNSUM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| ConfigError(format!("LOGNSUM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| ConfigError(format!("cannot size the worker pool: {e}")))
}

fn report_failures(failures: &[RowFailure]) {
    for f in failures {
        eprintln!("lognsum: {} at {}: {}", f.column, f.gamma, f.error);
    }
}

fn run(flags: &RunFlags) -> Result<u8, ConfigError> {
    let c = flags.resolve()?;
    let evaluated = methods::evaluate(&c)?;
    let metadata = vec![
        format!("lognsum {}", lognsum::VERSION),
        format!("config {}", serde_json::to_string(&c).expect("serialisable")),
        format!("rng {}", lognsum::RNG_ALGORITHM),
        format!("seed {}", c.mc.seed),
    ];
    let table = Table::from_curve(&evaluated.curve, metadata);
    let written = match &c.out {
        Some(path) => table.write_file(path),
        None => table.write_to(std::io::stdout().lock()),
    };
    written.map_err(|e| ConfigError(format!("cannot write output: {e}")))?;
    report_failures(&evaluated.failures);
    Ok(if evaluated.failures.is_empty() { 0 } else { NUMERIC_FAILURE })
}

fn figure(id: u32, out_dir: &PathBuf, opts: FigureOptions) -> Result<u8, ConfigError> {
    opts.quadrature.validate().map_err(|e| ConfigError(format!("quadrature: {e}")))?;
    opts.mc.validate().map_err(|e| ConfigError(format!("mc: {e}")))?;
    if opts.points < 2 {
        return Err(ConfigError("points: need at least 2".into()));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| ConfigError(format!("{}: {e}", out_dir.display())))?;
    let report = figures::figure(id, out_dir, &opts).map_err(|e| ConfigError(e.to_string()))?;
    for n in &report.notices {
        eprintln!("notice: {n}");
    }
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    report_failures(&report.failures);
    Ok(if report.failures.is_empty() { 0 } else { NUMERIC_FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Run(flags) => run(flags),
        Command::Figure {
            id,
            out_dir,
            points,
            quadrature,
            mc,
        } => {
            let mut opts = FigureOptions {
                points: *points,
                ..FigureOptions::default()
            };
            quadrature.apply(&mut opts.quadrature);
            mc.apply(&mut opts.mc);
            figure(*id, out_dir, opts)
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("lognsum: configuration error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}
