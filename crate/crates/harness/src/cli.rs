use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use handover_core::Vec3;

use crate::artifacts::write_all;
use crate::commands::{self, Output};
use crate::config::{ExperimentConfig, Overrides};
use crate::error::{HarnessError, Result};
use crate::runner::default_workers;

#[derive(Debug, Parser)]
#[command(name = "handover", version, about = "Ergonomic handover-point optimization")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Experiment config (TOML). Built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// First seed; runs use consecutive seeds from here.
    #[arg(long, global = true)]
    pub seed_base: Option<u64>,
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    #[arg(long, global = true)]
    pub budget_steps: Option<u64>,
    /// Grid spacing in meters.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one Q-learner per seed.
    Train,
    /// Score every grid cell.
    Sweep {
        /// Also write every cell's score to cells.csv.
        #[arg(long)]
        cells: bool,
    },
    /// Optimized versus shortest-distance handover from each start point.
    Compare {
        /// sweep_report.json or best_position.csv.
        #[arg(long)]
        optimum: PathBuf,
    },
    /// Full score breakdown and landmarks at one handover point.
    PoseDump {
        /// Handover midpoint `x,y,z` in meters.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Vec3,
    },
    /// Check run records against a sweep report.
    Verify {
        #[arg(long)]
        report: PathBuf,
        /// run_<seed>.json files.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

fn parse_point(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(format!("expected x,y,z but got {} values", parts.len())),
    }
}

fn config(g: &GlobalArgs) -> Result<ExperimentConfig> {
    let cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.with_overrides(&Overrides {
        seed_base: g.seed_base,
        budget_seconds: g.budget_seconds,
        budget_steps: g.budget_steps,
        step: g.step,
    })
}

fn finish(g: &GlobalArgs, out: Output) -> Result<String> {
    let written = write_all(&g.out, &out.artifacts)?;
    let mut text = out.summary;
    for p in written {
        text.push_str(&format!("wrote {}\n", p.display()));
    }
    Ok(text)
}

pub fn run(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    let workers = g.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(HarnessError::config("--workers", "must be positive"));
    }
    match &cli.command {
        Command::Train => finish(g, commands::train(&config(g)?, workers)?.0),
        Command::Sweep { cells } => finish(g, commands::sweep(&config(g)?, workers, *cells)?.0),
        Command::Compare { optimum } => {
            let cfg = config(g)?;
            let optimum = commands::load_optimum(optimum, &cfg.environment()?)?;
            finish(g, commands::compare(&cfg, optimum)?.0)
        }
        Command::PoseDump { point } => finish(g, commands::pose_dump(&config(g)?, *point)?.0),
        Command::Verify { report, runs } => {
            let report = commands::load_sweep(report)?.report;
            let runs = runs
                .iter()
                .map(|p| commands::load_run(p).map(|f| f.run))
                .collect::<Result<Vec<_>>>()?;
            Ok(commands::verify(&report, &runs)?.0)
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
