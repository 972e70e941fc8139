//! Subcommand implementations shared by the binary and the tests.

use cgsim_core::analytics::{self, AnalyticsError, DimensionRequest, ReliabilityResult};
use cgsim_core::engine;
use cgsim_core::{Scenario, SimReport};

use crate::report::{emit_report, sig6, ReportFormat, ReportRow};
use crate::scenario::{build_scenario, BuiltScenario, CliError, RawSpec, SweepSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Simulate,
    Analyze,
    Dimension { target: f64, r_max: u32 },
    Wastage,
    Sweep(SweepSpec),
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub format: Option<ReportFormat>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub packets: Option<u64>,
}

/// What a command produced: the artifact to write to `--out` (or stdout) and
/// optional human-readable notes for stdout/stderr.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOutput {
    pub artifact: String,
    pub summary: Option<String>,
    pub notes: Vec<String>,
}

fn apply_overrides(raw: &RawSpec, options: &RunOptions) -> RawSpec {
    let mut raw = raw.clone();
    if let Some(seed) = options.seed {
        raw.set("sim", "seed", &seed.to_string());
    }
    if let Some(packets) = options.packets {
        raw.set("sim", "packets", &packets.to_string());
    }
    raw
}

fn simulate(scenario: &Scenario, threads: Option<usize>) -> Result<SimReport, CliError> {
    let report = match threads {
        Some(threads) => engine::run_with_threads(scenario, threads),
        None => engine::run(scenario),
    };
    report.map_err(|e| CliError::Invalid(e.to_string()))
}

fn report_row(
    built: &BuiltScenario,
    report: SimReport,
    sweep: Option<(String, String)>,
    exact_reliability: Option<f64>,
) -> ReportRow {
    let scenario = &built.scenario;
    ReportRow {
        scenario_id: built.id.clone(),
        scheme: scenario.config.scheme.name().to_string(),
        t: scenario.tos_allocated_per_period(),
        k: scenario.config.rep_count,
        gap: built.gap,
        epsilon: scenario.channel.epsilon,
        collision: scenario.channel.shared_collision,
        packets: scenario.packets,
        seed: scenario.master_seed,
        report,
        sweep,
        exact_reliability,
    }
}

/// Exact reliability when the oracle applies; `Err` carries the reason it
/// does not (reported, never fatal — the simulation still runs).
fn try_exact(scenario: &Scenario) -> Result<ReliabilityResult, AnalyticsError> {
    analytics::reliability_exact(&scenario.config, &scenario.traffic, &scenario.channel)
}

fn render_analysis(result: &ReliabilityResult, format: ReportFormat) -> String {
    let header = [
        "arrival_offset",
        "to_index",
        "probability",
        "cg_reps",
        "shared_reps",
        "success",
    ];
    let rows: Vec<[String; 6]> = result
        .breakdown
        .iter()
        .map(|case| {
            [
                case.arrival_offset.to_string(),
                case.to_index.map(|i| i.to_string()).unwrap_or_default(),
                sig6(case.probability),
                case.cg_reps.to_string(),
                case.shared_reps.to_string(),
                sig6(case.success),
            ]
        })
        .collect();
    match format {
        ReportFormat::Csv => {
            let mut out = header.join(",");
            out.push('\n');
            for row in &rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        ReportFormat::JsonLines => {
            let mut out = String::new();
            for case in &result.breakdown {
                let value = serde_json::json!({
                    "arrival_offset": case.arrival_offset,
                    "to_index": case.to_index,
                    "probability": sig6(case.probability).parse::<f64>().unwrap(),
                    "cg_reps": case.cg_reps,
                    "shared_reps": case.shared_reps,
                    "success": sig6(case.success).parse::<f64>().unwrap(),
                });
                out.push_str(&value.to_string());
                out.push('\n');
            }
            out
        }
        ReportFormat::Table => {
            let widths: Vec<usize> = header
                .iter()
                .enumerate()
                .map(|(column, name)| {
                    rows.iter()
                        .map(|row| row[column].len())
                        .chain([name.len()])
                        .max()
                        .unwrap()
                })
                .collect();
            let mut out = String::new();
            let cells: Vec<String> = header
                .iter()
                .zip(&widths)
                .map(|(name, width)| format!("{name:>width$}"))
                .collect();
            out.push_str(&cells.join("  "));
            out.push('\n');
            for row in &rows {
                let cells: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(value, width)| format!("{value:>width$}"))
                    .collect();
                out.push_str(&cells.join("  "));
                out.push('\n');
            }
            out
        }
    }
}

pub fn run_command(
    command: &Command,
    raw: &RawSpec,
    default_id: &str,
    options: &RunOptions,
) -> Result<CommandOutput, CliError> {
    let raw = apply_overrides(raw, options);
    let format = options.format.unwrap_or(ReportFormat::Csv);
    match command {
        Command::Simulate => {
            let built = build_scenario(&raw, default_id)?;
            let report = simulate(&built.scenario, options.threads)?;
            let row = report_row(&built, report, None, None);
            Ok(CommandOutput {
                artifact: emit_report(&[row], format),
                ..Default::default()
            })
        }
        Command::Analyze => {
            let built = build_scenario(&raw, default_id)?;
            let result =
                try_exact(&built.scenario).map_err(|e| CliError::Invalid(e.to_string()))?;
            Ok(CommandOutput {
                artifact: render_analysis(&result, format),
                summary: Some(format!(
                    "exact_reliability = {} (p_no_arrival = {})",
                    sig6(result.reliability),
                    sig6(result.p_no_arrival)
                )),
                notes: Vec::new(),
            })
        }
        Command::Dimension { target, r_max } => {
            let built = build_scenario(&raw, default_id)?;
            let scenario = &built.scenario;
            let request = DimensionRequest {
                scheme: scenario.config.scheme.clone(),
                rv_pattern: scenario.config.rv_pattern.clone(),
                traffic: scenario.traffic.clone(),
                channel: scenario.channel.clone(),
                target: *target,
                k_floor: scenario.config.rep_count,
                r_max: *r_max,
                min_period: scenario.config.period_slots,
                max_periods_deferral: scenario.config.max_periods_deferral,
            };
            let t =
                analytics::dimension_t(&request).map_err(|e| CliError::Invalid(e.to_string()))?;
            Ok(CommandOutput {
                artifact: format!("{t}\n"),
                ..Default::default()
            })
        }
        Command::Wastage => {
            let built = build_scenario(&raw, default_id)?;
            let scenario = &built.scenario;
            // Same value as the p_o*T + sum p_i*(i-1) formula for a single
            // config; for multi-config it also charges the idle members.
            let wastage = analytics::expected_wastage_exact(&scenario.config, &scenario.traffic)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            Ok(CommandOutput {
                artifact: format!("{}\n", sig6(wastage)),
                ..Default::default()
            })
        }
        Command::Sweep(sweep) => {
            let mut rows = Vec::with_capacity(sweep.values.len());
            let mut notes = Vec::new();
            for value in &sweep.values {
                let mut point = raw.clone();
                point.set(&sweep.section, &sweep.key, value);
                let built = build_scenario(&point, default_id)?;
                let report = simulate(&built.scenario, options.threads)?;
                let exact = match try_exact(&built.scenario) {
                    Ok(result) => Some(result.reliability),
                    Err(reason) => {
                        notes.push(format!(
                            "exact oracle unavailable at {} = {value}: {reason}",
                            sweep.param()
                        ));
                        None
                    }
                };
                rows.push(report_row(
                    &built,
                    report,
                    Some((sweep.param(), value.clone())),
                    exact,
                ));
            }
            Ok(CommandOutput {
                artifact: emit_report(&rows, format),
                summary: None,
                notes,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    const MINIMAL: &str = "\
[config]
period = 10
offsets = 0,1,2,3
k = 4
pattern = 0,2,3,1
scheme = flexible

[traffic]
kind = uniform
lo = 0
hi = 3

[channel]
epsilon = 0.1

[sim]
packets = 20000
";

    fn options() -> RunOptions {
        RunOptions {
            format: Some(ReportFormat::Csv),
            threads: Some(2),
            seed: None,
            packets: None,
        }
    }

    #[test]
    fn simulate_emits_one_data_row() {
        let raw = parse_scenario(MINIMAL).unwrap();
        let output = run_command(&Command::Simulate, &raw, "demo", &options()).unwrap();
        assert_eq!(output.artifact.lines().count(), 2);
        assert!(output.artifact.starts_with("scenario_id,"));
    }

    #[test]
    fn analyze_reports_the_exact_reliability() {
        let raw = parse_scenario(MINIMAL).unwrap();
        let output = run_command(&Command::Analyze, &raw, "demo", &options()).unwrap();
        let summary = output.summary.unwrap();
        // Uniform over the 4 TOs of a T=K=4 window with deferral: value
        // computed by the analytics module; sanity-bound it here.
        assert!(summary.starts_with("exact_reliability = 0.9"), "{summary}");
        assert_eq!(output.artifact.lines().count(), 5);
    }

    #[test]
    fn dimension_matches_the_closed_form() {
        let text = MINIMAL
            .replace("offsets = 0,1,2,3", "offsets = 0")
            .replace("k = 4", "k = 1")
            .replace("kind = uniform\nlo = 0\nhi = 3", "kind = always\nslot = 0");
        let raw = parse_scenario(&text).unwrap();
        let output = run_command(
            &Command::Dimension {
                target: 0.9999,
                r_max: 32,
            },
            &raw,
            "demo",
            &options(),
        )
        .unwrap();
        assert_eq!(output.artifact, "4\n");
    }

    #[test]
    fn wastage_matches_the_formula() {
        let raw = parse_scenario(MINIMAL).unwrap();
        let output = run_command(&Command::Wastage, &raw, "demo", &options()).unwrap();
        assert_eq!(output.artifact, "1.50000\n");
    }

    #[test]
    fn sweep_emits_one_row_per_value_with_the_oracle_column() {
        let raw = parse_scenario(MINIMAL).unwrap();
        let sweep = SweepSpec::parse("channel.epsilon=0.05,0.1,0.2").unwrap();
        let output = run_command(&Command::Sweep(sweep), &raw, "demo", &options()).unwrap();
        let lines: Vec<&str> = output.artifact.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("sweep_param,sweep_value,"));
        assert!(lines[0].ends_with(",exact_reliability"));
        // Reliability strictly decreasing in epsilon.
        let reliability: Vec<f64> = lines[1..]
            .iter()
            .map(|line| line.split(',').nth(11).unwrap().parse().unwrap())
            .collect();
        assert!(reliability[0] > reliability[1] && reliability[1] > reliability[2]);
    }
}
