//! `cgsim` — scenario-driven simulator and analytics for configured-grant
//! uplink repetitions.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use cgsim_cli::commands::{run_command, Command, RunOptions};
use cgsim_cli::report::ReportFormat;
use cgsim_cli::scenario::{parse_scenario, SweepSpec};

#[derive(Parser)]
#[command(
    name = "cgsim",
    about = "Slot-level simulator for 5G NR configured-grant uplink repetitions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Scenario file (sections [config], [traffic], [channel], [sim], ...).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Override the scenario's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the scenario's packet count.
    #[arg(long, global = true)]
    packets: Option<u64>,

    /// Write the report artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, default_value = "csv")]
    format: ReportFormat,

    /// Worker threads for the simulation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Sub {
    /// Monte-Carlo run producing a reliability/latency/wastage report.
    Simulate,
    /// Exact reliability with its per-arrival breakdown.
    Analyze,
    /// Smallest TO count reaching a reliability target.
    Dimension {
        /// Target reliability in [0, 1).
        #[arg(long)]
        target: f64,
        /// Largest TO count to try.
        #[arg(long, default_value_t = 32)]
        r_max: u32,
    },
    /// Expected TOs wasted per period under the scenario's arrival law.
    Wastage,
    /// Re-run the scenario across parameter values (simulated + exact columns).
    Sweep {
        /// Swept parameter, e.g. channel.epsilon=0.05,0.1,0.2 or config.t=4:8:1.
        #[arg(long)]
        sweep: String,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();

    let Some(path) = &cli.scenario else {
        bail!("--scenario <path> is required");
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenario {}", path.display()))?;
    let raw = parse_scenario(&text).with_context(|| format!("parsing {}", path.display()))?;
    let default_id = path
        .file_stem()
        .map(|stem| stem.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());

    let command = match &cli.command {
        Sub::Simulate => Command::Simulate,
        Sub::Analyze => Command::Analyze,
        Sub::Dimension { target, r_max } => Command::Dimension {
            target: *target,
            r_max: *r_max,
        },
        Sub::Wastage => Command::Wastage,
        Sub::Sweep { sweep } => Command::Sweep(SweepSpec::parse(sweep)?),
    };
    let options = RunOptions {
        format: Some(cli.format),
        threads: cli.threads,
        seed: cli.seed,
        packets: cli.packets,
    };

    let output = run_command(&command, &raw, &default_id, &options)?;
    for note in &output.notes {
        eprintln!("note: {note}");
    }
    match &cli.out {
        Some(out) => {
            std::fs::write(out, &output.artifact)
                .with_context(|| format!("writing {}", out.display()))?;
        }
        None => print!("{}", output.artifact),
    }
    if let Some(summary) = &output.summary {
        println!("{summary}");
    }
    Ok(())
}
