//! Command line front end: runs one sweep, writes CSV/SVG, reports checks.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime error,
//! 4 a cross-validation check failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use uav_irs_noma::coverage::WeightMode;
use uav_irs_noma::experiment::{emit_csv, emit_svg, run, ExperimentConfig, RunMode, SweepKind};
use uav_irs_noma::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "uav-irs-noma", version, about = "Coverage of UAV-IRS assisted NOMA cellular networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment config; the built-in preset of the subcommand is used
    /// when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Monte Carlo trials per point (windows for assoc-stats).
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Base seed of the per-trial random streams (at most 2^63 - 1).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// analytic, mc or both.
    #[arg(long, global = true)]
    mode: Option<RunMode>,

    /// binomial or paper-literal.
    #[arg(long, global = true)]
    weight_mode: Option<WeightMode>,

    /// CSV destination; printed to stdout when omitted.
    #[arg(long, global = true)]
    out_csv: Option<PathBuf>,

    /// SVG chart destination; no chart when omitted.
    #[arg(long, global = true)]
    out_svg: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Coverage of both users against P_n/P_f.
    PowerSweep,
    /// Far-user coverage against the UAV elevation angle.
    ElevationSweep,
    /// Users and UAVs per BS: PMFs against simulation.
    AssocStats,
    /// Optimal elevation angle per number of reflecting elements.
    Optimize,
    /// Parse and validate a config, then print its canonical form.
    ValidateConfig,
}

impl Command {
    fn kind(self) -> Option<SweepKind> {
        match self {
            Command::PowerSweep => Some(SweepKind::PowerRatio),
            Command::ElevationSweep => Some(SweepKind::Elevation),
            Command::AssocStats => Some(SweepKind::AssocStats),
            Command::Optimize => Some(SweepKind::OptimizeElevation),
            Command::ValidateConfig => None,
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (&cli.config, cli.command.kind()) {
        (Some(path), kind) => {
            let cfg = ExperimentConfig::load(path)?;
            if let Some(kind) = kind {
                if cfg.sweep.kind() != kind {
                    return Err(Error::Config(format!(
                        "{}: sweep.kind is for `{}`, not `{kind}`",
                        path.display(),
                        cfg.sweep.kind()
                    )));
                }
            }
            cfg
        }
        (None, Some(kind)) => ExperimentConfig::preset(kind),
        (None, None) => return Err(Error::Config("validate-config needs --config".into())),
    };
    if let Some(t) = cli.trials {
        cfg.sim.trials = t;
    }
    if let Some(s) = cli.seed {
        cfg.sim.seed = s;
    }
    if let Some(m) = cli.mode {
        cfg.mode = m;
    }
    if let Some(w) = cli.weight_mode {
        cfg.weight_mode = w;
    }
    if cli.out_csv.is_some() {
        cfg.output.csv = cli.out_csv.clone();
    }
    if cli.out_svg.is_some() {
        cfg.output.svg = cli.out_svg.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if cli.command.kind().is_none() {
        return match cfg.to_toml() {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        };
    }

    let out = match run(&cfg) {
        Ok(out) => out,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let written = match &cfg.output.csv {
        Some(path) => emit_csv(&out.table, path),
        None => {
            print!("{}", out.table.to_csv());
            Ok(())
        }
    }
    .and_then(|_| cfg.output.svg.as_ref().map_or(Ok(()), |path| emit_svg(&out.table, path)));
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_RUNTIME);
    }

    for line in &out.summary {
        eprintln!("{line}");
    }
    for c in &out.checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if out.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
