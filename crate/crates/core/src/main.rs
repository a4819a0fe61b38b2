use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use uavloc::cli::{parse_config, run_subcommand, Overrides, RunConfig, Subcommand};
use uavloc::LinkMode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    PowerCurve,
    SweepAltitude,
    SweepRadius,
    SweepHover,
    Coverage,
    Optimize,
    Evaluate,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::PowerCurve => Subcommand::PowerCurve,
            Command::SweepAltitude => Subcommand::SweepAltitude,
            Command::SweepRadius => Subcommand::SweepRadius,
            Command::SweepHover => Subcommand::SweepHover,
            Command::Coverage => Subcommand::Coverage,
            Command::Optimize => Subcommand::Optimize,
            Command::Evaluate => Subcommand::Evaluate,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Bernoulli,
    ConditionedLos,
    ConditionedNlos,
    Averaged,
}

impl From<Mode> for LinkMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Bernoulli => LinkMode::Bernoulli,
            Mode::ConditionedLos => LinkMode::ConditionedLos,
            Mode::ConditionedNlos => LinkMode::ConditionedNlos,
            Mode::Averaged => LinkMode::Averaged,
        }
    }
}

/// UAV anchor trajectory simulator: power curves, error sweeps, coverage and
/// energy-constrained grid optimization, written as CSV.
#[derive(Debug, Parser)]
#[command(name = "uavloc", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML config; defaults apply to anything left out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (default: <command>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    h_min: Option<f64>,
    #[arg(long)]
    h_max: Option<f64>,
    #[arg(long)]
    h_step: Option<f64>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    r_step: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_step: Option<f64>,
    /// Comma-separated waypoint counts, e.g. 3,4.
    #[arg(long, value_delimiter = ',')]
    m_list: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    link_mode: Option<Mode>,
    /// Energy budget for `optimize`, J.
    #[arg(long)]
    budget: Option<f64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

fn load(path: Option<&PathBuf>) -> Result<RunConfig, String> {
    let text = match path {
        Some(p) => {
            std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?
        }
        None => String::new(),
    };
    parse_config(&text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match load(args.config.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let overrides = Overrides {
        out: args.out,
        seed: args.seed,
        trials: args.trials,
        h_min: args.h_min,
        h_max: args.h_max,
        h_step: args.h_step,
        r_min: args.r_min,
        r_max: args.r_max,
        r_step: args.r_step,
        t_min: args.t_min,
        t_max: args.t_max,
        t_step: args.t_step,
        m_list: args.m_list,
        link_mode: args.link_mode.map(Into::into),
        budget: args.budget,
        workers: args.workers,
    };
    match run_subcommand(args.command.into(), &config, &overrides) {
        Ok(report) => {
            println!("{}", report.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
