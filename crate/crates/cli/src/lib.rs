//! Scenario-file ingestion, sweeps and report emission for the `cgsim`
//! binary. Kept as a library so the pieces are testable without spawning the
//! executable.

pub mod commands;
pub mod report;
pub mod scenario;

pub use commands::{run_command, Command, RunOptions};
pub use report::{ReportFormat, ReportRow};
pub use scenario::{parse_scenario, BuiltScenario, CliError, RawSpec, SweepSpec};
