mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Experiment, ExperimentConfig, GridParams};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parameter error: {0}")]
    Parameter(#[from] qdirac::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// q-deformed Dirac oscillator experiments.
#[derive(Parser, Debug)]
#[command(name = "qdirac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic spectrum `±sqrt(1 + 4 xi [n])`, checked by diagonalization.
    Spectrum,
    /// Mandel parameters over the intensity range of the coherent states.
    Mandel,
    /// `<L_z>`, `<S_z>`, `<J_z>` for a number state, or a coherent state with `--coherent`.
    Zitter {
        #[arg(long)]
        coherent: bool,
    },
    /// Coherent-state `J_z` collapse and revival trace.
    Fig2,
    /// Non-relativistic limit: `<M>` and first-order `<J_z>`.
    Nr,
    /// Grid realization convergence table.
    Grid {
        /// Cells per `α` shift.
        #[arg(long)]
        cells: Option<usize>,
        /// Grid sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<usize>>,
    },
    /// Entrywise comparison of the Dirac and anti-Jaynes-Cummings matrices.
    Equivalence,
    /// The full acceptance suite.
    Verify,
    /// Runs the experiment named in `--config`.
    Run,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML experiment file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    q: Option<f64>,
    #[arg(long, global = true)]
    xi: Option<f64>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    trunc: Option<usize>,
    #[arg(long, global = true)]
    tau_max: Option<f64>,
    #[arg(long, global = true)]
    tau_steps: Option<usize>,
    #[arg(long, global = true)]
    mandel_points: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies every tolerance of the checks.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let base = match &cli.common.config {
        Some(path) => ExperimentConfig::from_toml(
            &std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        )?,
        None => ExperimentConfig::default(),
    };
    let c = cli.common;
    let mut flags = ExperimentConfig {
        experiment: None,
        q: c.q,
        xi: c.xi,
        n: c.n,
        alpha: c.alpha,
        trunc: c.trunc,
        tau_max: c.tau_max,
        tau_steps: c.tau_steps,
        mandel_points: c.mandel_points,
        grid: GridParams::default(),
        out: c.out,
        seed: c.seed,
        tol_scale: c.tol_scale,
    };
    flags.experiment = match cli.command {
        Command::Spectrum => Some(Experiment::Spectrum),
        Command::Mandel => Some(Experiment::Mandel),
        Command::Zitter { coherent: false } => Some(Experiment::ZitterNumber),
        Command::Zitter { coherent: true } => Some(Experiment::ZitterCoherent),
        Command::Fig2 => Some(Experiment::Fig2),
        Command::Nr => Some(Experiment::NrLimit),
        Command::Grid { cells, points } => {
            let mut g = base.grid.clone();
            if let Some(k) = cells {
                g.cells_per_shift = k;
            }
            if let Some(p) = points {
                g.points = p;
            }
            flags.grid = g;
            Some(Experiment::GridVerify)
        }
        Command::Equivalence => Some(Experiment::Equivalence),
        Command::Verify => Some(Experiment::Verify),
        Command::Run => None,
    };
    Ok(base.overlay(flags))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = build_config(cli).and_then(|c| run::run(&c));
    match result {
        Ok(report) => {
            for c in &report.checks {
                println!("{} {} = {:e} ({:?})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.measured, c.bound);
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("qdirac: {e}");
            ExitCode::from(2)
        }
    }
}
