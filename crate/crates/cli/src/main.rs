//! `finpop` command-line front end.
//!
//! Exit status: 0 when every verdict passes, 2 when any verdict fails,
//! 1 on usage, input or configuration errors.

mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use finpop::config::{DesignConfig, PopulationFile};
use finpop::verify::{self, Frame, MonteCarloSettings, Scenario, Tolerances};

#[derive(Debug, Parser)]
#[command(
    name = "finpop",
    version,
    about = "Finite-population sampling: closed forms vs enumeration vs Monte Carlo"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare closed-form moments with exact enumeration and a seeded Monte Carlo run.
    Verify(RunArgs),
    /// Without- vs with-replacement variance ratio against the finite population correction.
    Compare(RunArgs),
    /// Dump exact count distributions or estimator moments.
    Enumerate(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Population file (JSON).
    #[arg(long)]
    population: PathBuf,
    /// Design configuration: inline JSON or a path to a JSON file.
    #[arg(long)]
    design: String,
    /// Monte Carlo trials.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Seed for every random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Absolute tolerance for exact comparisons.
    #[arg(long)]
    tolerance_abs: Option<f64>,
    /// Worker threads for Monte Carlo; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

impl RunArgs {
    fn scenario(&self) -> anyhow::Result<Scenario> {
        let text = fs::read_to_string(&self.population)
            .with_context(|| format!("cannot read population file {}", self.population.display()))?;
        let population = PopulationFile::from_json(&text)
            .with_context(|| format!("invalid population file {}", self.population.display()))?;
        let design = load_design(&self.design)?;
        Ok(design.scenario(&population)?)
    }

    fn tolerances(&self) -> anyhow::Result<Tolerances> {
        let mut t = Tolerances::default();
        if let Some(abs) = self.tolerance_abs {
            if !(abs.is_finite() && abs >= 0.0) {
                bail!("--tolerance-abs must be a non-negative number");
            }
            t.oracle_abs = abs;
        }
        Ok(t)
    }

    fn monte_carlo(&self) -> Option<MonteCarloSettings> {
        self.seed.map(|seed| MonteCarloSettings {
            trials: self.trials,
            seed,
            workers: self.workers,
        })
    }

    fn emit(&self, json: String, table: String) -> anyhow::Result<()> {
        let body = match self.format {
            Format::Json => json,
            Format::Table => table,
        };
        match &self.out {
            Some(path) => fs::write(path, body + "\n").with_context(|| format!("cannot write {}", path.display())),
            None => {
                println!("{body}");
                Ok(())
            }
        }
    }
}

fn load_design(arg: &str) -> anyhow::Result<DesignConfig> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_owned()
    } else {
        fs::read_to_string(Path::new(arg)).with_context(|| format!("cannot read design file {arg}"))?
    };
    DesignConfig::from_json(&text).context("invalid design configuration")
}

fn cmd_verify(args: &RunArgs) -> anyhow::Result<bool> {
    let Some(settings) = args.monte_carlo() else {
        bail!("verify needs --seed");
    };
    let scenario = args.scenario()?;
    let tolerances = args.tolerances()?;
    let reports = scenario
        .estimators()
        .into_iter()
        .map(|est| verify::verify_scenario(&scenario, est, true, Some(&settings), tolerances))
        .collect::<Result<Vec<_>, _>>()?;
    args.emit(serde_json::to_string_pretty(&reports)?, table::moment_reports(&reports))?;
    Ok(reports.iter().all(|r| r.pass))
}

fn cmd_compare(args: &RunArgs) -> anyhow::Result<bool> {
    let scenario = args.scenario()?;
    let tolerances = args.tolerances()?;
    let fallback = args.monte_carlo();
    let reports = scenario
        .estimators()
        .into_iter()
        .map(|est| verify::relative_efficiency(&scenario, est, fallback.as_ref(), tolerances))
        .collect::<Result<Vec<_>, _>>()?;
    args.emit(
        serde_json::to_string_pretty(&reports)?,
        table::efficiency_reports(&reports),
    )?;
    Ok(reports.iter().all(|r| r.pass))
}

fn cmd_enumerate(args: &RunArgs) -> anyhow::Result<bool> {
    let scenario = args.scenario()?;
    if let Frame::Classified(pop) = scenario.frame() {
        let report = verify::count_distribution_report(pop, scenario.draws() as u64, scenario.design().replacement())?;
        args.emit(
            serde_json::to_string_pretty(&report)?,
            table::count_distribution(&report),
        )?;
    } else {
        let reports = scenario
            .estimators()
            .into_iter()
            .map(|est| verify::enumeration_report(&scenario, est))
            .collect::<Result<Vec<_>, _>>()?;
        args.emit(
            serde_json::to_string_pretty(&reports)?,
            table::enumeration_reports(&reports),
        )?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            return if usage_error {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Enumerate(args) => cmd_enumerate(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
