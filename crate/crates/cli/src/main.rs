// SPDX-License-Identifier: Apache-2.0

//! `plan`: wavelength planning for DWDM links carrying QKD channels.
//!
//! Exit status: 0 feasible, 1 usage or input error, 2 infeasible, 3 budget
//! refusal.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qkdwa::assign::{SearchOptions, DEFAULT_BUDGET};
use qkdwa::experiments::{run, Command, ExperimentSpec, OutputFormat, Status};
use qkdwa::par::Exec;
use qkdwa::raman::RamanCrossSectionTable;
use qkdwa::scenario::ScenarioFile;
use qkdwa::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "plan",
    version,
    about = "Assign DWDM wavelengths to quantum and classical channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Near-optimal plan for the scenario
    Optimize,
    /// Wavelength pattern per N over the sweep range
    Pattern,
    /// Rate enhancement over the conventional layout across (M, N)
    SweepRe,
    /// Largest classical load with positive key rate
    Nmax,
    /// Exhaustive optimum vs near-optimal vs conventional per M
    Compare,
    /// Exact and linear key rate against crosstalk
    RateCurve,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (TOML)
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Raman cross-section table (CSV: shift_nm,beta_per_km_nm)
    #[arg(long, global = true)]
    raman: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Output file; standard output when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum candidates for exhaustive searches
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Per-channel key rate floor in bit/s, overriding the scenario
    #[arg(long, global = true, allow_negative_numbers = true)]
    rth: Option<f64>,
    /// Disable the thread pool
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Text,
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(Status::Feasible) => ExitCode::SUCCESS,
        Ok(Status::Infeasible) => ExitCode::from(EXIT_INFEASIBLE),
        Ok(Status::Refused) => ExitCode::from(EXIT_BUDGET),
        Err(e) => {
            eprintln!("plan: {e}");
            ExitCode::from(match e {
                Error::Infeasible(_) => EXIT_INFEASIBLE,
                Error::Budget { .. } => EXIT_BUDGET,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn execute(cli: Cli) -> qkdwa::Result<Status> {
    let c = cli.common;
    let scenario_path = c
        .scenario
        .ok_or_else(|| Error::Config("--scenario is required".into()))?;
    let raman_path = c
        .raman
        .ok_or_else(|| Error::Config("--raman is required".into()))?;
    let mut scenario =
        ScenarioFile::load(&scenario_path).map_err(|e| with_path(&scenario_path, e))?;
    if let Some(r_th) = c.rth {
        if r_th.is_nan() {
            return Err(Error::Config("--rth is NaN".into()));
        }
        scenario.scenario.r_th = r_th;
    }
    let grid = scenario.grid()?;
    let source = File::open(&raman_path).map_err(|e| with_path(&raman_path, e.into()))?;
    let raman = RamanCrossSectionTable::from_csv_for_grid(source, &grid)
        .map_err(|e| with_path(&raman_path, e))?;
    let link = scenario.link(raman)?;
    let exec = if c.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let spec = ExperimentSpec {
        command: match cli.command {
            Cmd::Optimize => Command::Optimize,
            Cmd::Pattern => Command::Pattern,
            Cmd::SweepRe => Command::SweepRe,
            Cmd::Nmax => Command::NMax,
            Cmd::Compare => Command::Compare,
            Cmd::RateCurve => Command::RateCurve,
        },
        scenario,
        link,
        format: match c.format {
            Format::Text => OutputFormat::Text,
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
        out: c.out,
        options: SearchOptions::default()
            .with_exec(exec)
            .with_budget(c.budget),
    };
    let (report, status) = run(&spec)?;
    let rendered = report.render(spec.format);
    match &spec.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => std::io::stdout().lock().write_all(rendered.as_bytes())?,
    }
    Ok(status)
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io(io) => Error::Config(format!("{}: {io}", path.display())),
        Error::Ingest { line, msg } => Error::Ingest {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    }
}
