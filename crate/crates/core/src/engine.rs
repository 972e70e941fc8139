//! Replicated Monte-Carlo driver.
//!
//! Each packet occupies its own CG period and is simulated as an independent
//! trial: sample the arrival, plan, transmit, decode. Packet `i` draws from a
//! ChaCha stream derived from `(master_seed, i)`, so a report is a pure
//! function of the scenario and seed regardless of thread count. Aggregation
//! keeps integer accumulators and sorts latency samples, making the output
//! bit-identical across parallelism degrees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CgConfig, SchemeKind};
use crate::phy::{self, ChannelParams};
use crate::schemes::{self};
use crate::traffic::TrafficModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid scenario: {0:?}")]
    InvalidScenario(Vec<String>),
    #[error("confidence interval needs at least one trial")]
    NoTrials,
    #[error("percentile of an empty sample set")]
    EmptySamples,
    #[error(transparent)]
    Plan(#[from] crate::schemes::PlanError),
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
}

/// A complete simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: CgConfig,
    pub traffic: TrafficModel,
    pub channel: ChannelParams,
    /// Maps slots to milliseconds in the latency report.
    pub slot_duration_ms: f64,
    /// Number of simulated periods (one potential packet each).
    pub packets: u64,
    pub master_seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Vec<String> {
        let mut violations = self.config.validate();
        violations.extend(self.traffic.validate(&self.config));
        violations.extend(self.channel.validate());
        if self.packets == 0 {
            violations.push("packets must be >= 1".to_string());
        }
        if !(self.slot_duration_ms.is_finite() && self.slot_duration_ms > 0.0) {
            violations.push(format!(
                "slot duration {} must be positive",
                self.slot_duration_ms
            ));
        }
        violations
    }

    /// TOs allocated per period, summed over all member configs for
    /// multi-config (only one is used at a time, but all are reserved).
    pub fn tos_allocated_per_period(&self) -> u64 {
        match &self.config.scheme {
            SchemeKind::MultiConfig(members) => {
                members.iter().map(|member| member.to_count() as u64).sum()
            }
            _ => self.config.to_count() as u64,
        }
    }
}

/// Latency percentiles in slots (nearest-rank).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LatencySlots {
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

/// Latency percentiles scaled to milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LatencyMs {
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

/// Aggregated result of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    /// Packets decoded within their latency budget.
    pub delivered: u64,
    /// Periods that actually had an arrival.
    pub attempted: u64,
    pub reliability: f64,
    /// Wilson score interval (z = 1.96) around the reliability estimate.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub latency_slots: LatencySlots,
    pub latency_ms: LatencyMs,
    /// Mean wasted TOs per period, over all periods including empty ones.
    pub mean_wastage_tos: f64,
    pub tos_allocated_per_period: u64,
    /// Shared-band repetitions transmitted over the whole run.
    pub shared_reps_used: u64,
}

/// z value for the report's confidence interval (95%).
pub const REPORT_CI_Z: f64 = 1.96;

#[derive(Default)]
struct Tally {
    delivered: u64,
    attempted: u64,
    wasted: u64,
    shared_used: u64,
    latencies: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.delivered += other.delivered;
        self.attempted += other.attempted;
        self.wasted += other.wasted;
        self.shared_used += other.shared_used;
        self.latencies.extend(other.latencies);
        self
    }
}

fn simulate_packet(scenario: &Scenario, period: u64) -> Tally {
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.master_seed);
    rng.set_stream(period);

    let arrival = scenario
        .traffic
        .sample_arrival(&scenario.config, period, &mut rng);
    let Some(arrival) = arrival else {
        tally.wasted = scenario.tos_allocated_per_period();
        return tally;
    };
    tally.attempted = 1;

    // The scenario was validated up front, so planning cannot fail here.
    let plan = schemes::plan(&scenario.config, arrival).expect("validated scenario plans");
    tally.shared_used = plan.shared_count() as u64;
    tally.wasted = schemes::wasted_tos(&plan, &scenario.config, Some(arrival), period);

    let outcomes = phy::transmit(&plan, &scenario.channel, &mut rng);
    if let Some(decode_slot) = phy::decode(&outcomes, &scenario.channel.decode_model) {
        debug_assert!(decode_slot < arrival + scenario.config.latency_budget_slots);
        tally.delivered = 1;
        tally.latencies.push(decode_slot - arrival + 1);
    }
    tally
}

fn run_inner(scenario: &Scenario) -> Result<SimReport, EngineError> {
    let violations = scenario.validate();
    if !violations.is_empty() {
        return Err(EngineError::InvalidScenario(violations));
    }

    let mut tally = (0..scenario.packets)
        .into_par_iter()
        .map(|period| simulate_packet(scenario, period))
        .reduce(Tally::default, Tally::merge);
    tally.latencies.sort_unstable();

    let (reliability, ci_lo, ci_hi) = if tally.attempted == 0 {
        (0.0, 0.0, 1.0)
    } else {
        let (lo, hi) = wilson_ci(tally.delivered, tally.attempted, REPORT_CI_Z)?;
        (tally.delivered as f64 / tally.attempted as f64, lo, hi)
    };

    let latency_slots = if tally.latencies.is_empty() {
        LatencySlots::default()
    } else {
        LatencySlots {
            p50: percentile(&tally.latencies, 0.50)?,
            p90: percentile(&tally.latencies, 0.90)?,
            p99: percentile(&tally.latencies, 0.99)?,
            max: *tally.latencies.last().unwrap(),
        }
    };
    let to_ms = |slots: u64| slots as f64 * scenario.slot_duration_ms;
    Ok(SimReport {
        delivered: tally.delivered,
        attempted: tally.attempted,
        reliability,
        ci_lo,
        ci_hi,
        latency_slots,
        latency_ms: LatencyMs {
            p50: to_ms(latency_slots.p50),
            p90: to_ms(latency_slots.p90),
            p99: to_ms(latency_slots.p99),
            max: to_ms(latency_slots.max),
        },
        mean_wastage_tos: tally.wasted as f64 / scenario.packets as f64,
        tos_allocated_per_period: scenario.tos_allocated_per_period(),
        shared_reps_used: tally.shared_used,
    })
}

/// Runs the scenario on the global thread pool.
pub fn run(scenario: &Scenario) -> Result<SimReport, EngineError> {
    run_inner(scenario)
}

/// Runs the scenario on a dedicated pool of `threads` workers. The report is
/// identical for every thread count.
pub fn run_with_threads(scenario: &Scenario, threads: usize) -> Result<SimReport, EngineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| EngineError::ThreadPool(e.to_string()))?;
    pool.install(|| run_inner(scenario))
}

/// Wilson score interval for `successes` out of `trials`, clamped to [0, 1].
pub fn wilson_ci(successes: u64, trials: u64, z: f64) -> Result<(f64, f64), EngineError> {
    if trials == 0 {
        return Err(EngineError::NoTrials);
    }
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Nearest-rank percentile: the value at 1-based index `ceil(q * n)` of the
/// ascending sort. `samples` must already be sorted.
pub fn percentile(samples: &[u64], q: f64) -> Result<u64, EngineError> {
    if samples.is_empty() {
        return Err(EngineError::EmptySamples);
    }
    let rank = (q * samples.len() as f64).ceil() as usize;
    Ok(samples[rank.clamp(1, samples.len()) - 1])
}
