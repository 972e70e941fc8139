//! Per-period packet-arrival laws.
//!
//! Each CG period carries at most one packet. An arrival at slot `s` may use
//! a TO at slot `t` iff `s <= t` (the packet is ready at the slot boundary,
//! before the slot begins). "Semi-deterministic" traffic is parameterised by
//! the four variants below; laws whose support extends past the period fold
//! the excess mass into the no-arrival probability `p_o`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::CgConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrafficError {
    #[error("explicit pmf lists {got} TO probabilities but the config allocates {expected} TOs")]
    PmfLengthMismatch { expected: usize, got: usize },
}

/// Arrival law for the single packet of a period, expressed over slot offsets
/// within the period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrafficModel {
    /// Fully deterministic: the packet is ready at the same offset each period.
    AlwaysAtSlot(u64),
    /// Uniform over the inclusive offset range `lo..=hi`.
    UniformOverSlots { lo: u64, hi: u64 },
    /// Geometric delay with mean `gamma` slots, truncated at the period end;
    /// mass beyond the period becomes "no arrival".
    GeometricDelay { gamma: f64 },
    /// Arbitrary law given directly over TO indices: `p_none` is the
    /// no-arrival probability, `per_to[i]` the probability the packet becomes
    /// ready exactly at the (i+1)-th TO. A vector shorter than T is
    /// zero-padded.
    ExplicitPmf { p_none: f64, per_to: Vec<f64> },
}

/// Arrival probabilities binned by TO: `per_to[i]` is the probability that
/// the earliest usable TO is the (i+1)-th one; `p_none` collects no-arrival
/// periods and arrivals after the last TO (which waste all T TOs).
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalPmf {
    pub p_none: f64,
    pub per_to: Vec<f64>,
}

impl TrafficModel {
    /// Violations of the model's own invariants against a config's period.
    pub fn validate(&self, config: &CgConfig) -> Vec<String> {
        let period = config.period_slots;
        let mut violations = Vec::new();
        match self {
            TrafficModel::AlwaysAtSlot(slot) => {
                if *slot >= period {
                    violations.push(format!("arrival slot {slot} >= period {period}"));
                }
            }
            TrafficModel::UniformOverSlots { lo, hi } => {
                if lo > hi {
                    violations.push(format!("uniform range lo {lo} > hi {hi}"));
                }
                if *hi >= period {
                    violations.push(format!("uniform hi {hi} >= period {period}"));
                }
            }
            TrafficModel::GeometricDelay { gamma } => {
                if !gamma.is_finite() || *gamma <= 0.0 {
                    violations.push(format!("gamma {gamma} must be a positive real"));
                }
            }
            TrafficModel::ExplicitPmf { p_none, per_to } => {
                if !(0.0..=1.0).contains(p_none) {
                    violations.push(format!("probability p_none = {p_none} out of range"));
                }
                for (index, p) in per_to.iter().enumerate() {
                    if !(0.0..=1.0).contains(p) {
                        violations.push(format!("probability p[{index}] = {p} out of range"));
                    }
                }
                let total: f64 = p_none + per_to.iter().sum::<f64>();
                if (total - 1.0).abs() > 1e-12 {
                    violations.push(format!("pmf sums to {total}, expected 1"));
                }
                if per_to.len() > config.to_count() {
                    violations.push(format!(
                        "pmf lists {} TO probabilities but the config allocates {}",
                        per_to.len(),
                        config.to_count()
                    ));
                }
            }
        }
        violations
    }

    /// Draws the arrival for one period: `None` models "no packet". The
    /// returned slot is absolute. Pure given the RNG stream; parallel callers
    /// must use disjoint streams.
    pub fn sample_arrival(
        &self,
        config: &CgConfig,
        period_index: u64,
        rng: &mut impl Rng,
    ) -> Option<u64> {
        let base = period_index * config.period_slots;
        match self {
            TrafficModel::AlwaysAtSlot(slot) => Some(base + slot),
            TrafficModel::UniformOverSlots { lo, hi } => Some(base + rng.random_range(*lo..=*hi)),
            TrafficModel::GeometricDelay { gamma } => {
                let offset = sample_geometric(*gamma, rng);
                (offset < config.period_slots).then(|| base + offset)
            }
            TrafficModel::ExplicitPmf { p_none, per_to } => {
                let u: f64 = rng.random();
                if u < *p_none {
                    return None;
                }
                let mut acc = *p_none;
                let mut last_positive = None;
                for (index, &p) in per_to.iter().enumerate() {
                    if p > 0.0 {
                        last_positive = Some(index);
                    }
                    acc += p;
                    if u < acc {
                        return Some(base + config.to_offsets[index]);
                    }
                }
                // Floating-point dust at the top of the CDF.
                last_positive.map(|index| base + config.to_offsets[index])
            }
        }
    }

    /// The law as explicit (offset, probability) mass points plus the
    /// no-arrival mass. Offsets are within-period.
    pub(crate) fn slot_law(
        &self,
        config: &CgConfig,
    ) -> Result<(Vec<(u64, f64)>, f64), TrafficError> {
        let period = config.period_slots;
        match self {
            TrafficModel::AlwaysAtSlot(slot) => Ok((vec![(*slot, 1.0)], 0.0)),
            TrafficModel::UniformOverSlots { lo, hi } => {
                let w = 1.0 / (hi - lo + 1) as f64;
                Ok(((*lo..=*hi).map(|s| (s, w)).collect(), 0.0))
            }
            TrafficModel::GeometricDelay { gamma } => {
                let p = 1.0 / (1.0 + gamma);
                let law = (0..period)
                    .map(|s| (s, p * (1.0 - p).powi(s as i32)))
                    .collect();
                Ok((law, (1.0 - p).powi(period as i32)))
            }
            TrafficModel::ExplicitPmf { p_none, per_to } => {
                if per_to.len() > config.to_count() {
                    return Err(TrafficError::PmfLengthMismatch {
                        expected: config.to_count(),
                        got: per_to.len(),
                    });
                }
                let law = per_to
                    .iter()
                    .enumerate()
                    .map(|(index, &p)| (config.to_offsets[index], p))
                    .collect();
                Ok((law, *p_none))
            }
        }
    }

    /// Bins the arrival law by TO: an arrival lands in bin `i` when it can
    /// first be served by the (i+1)-th configured TO. Arrivals after the last
    /// TO fold into `p_none`.
    pub fn arrival_pmf(&self, config: &CgConfig) -> Result<ArrivalPmf, TrafficError> {
        let (law, mut p_none) = self.slot_law(config)?;
        let mut per_to = vec![0.0; config.to_count()];
        for (offset, weight) in law {
            match config.to_offsets.iter().position(|&to| to >= offset) {
                Some(bin) => per_to[bin] += weight,
                None => p_none += weight,
            }
        }
        Ok(ArrivalPmf { p_none, per_to })
    }
}

/// Geometric draw on {0, 1, ...} with mean `gamma`, by inversion of a single
/// uniform draw (keeps the per-period draw count fixed).
fn sample_geometric(gamma: f64, rng: &mut impl Rng) -> u64 {
    let p = 1.0 / (1.0 + gamma);
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = rng.random();
    let x = ((1.0 - u).ln() / (1.0 - p).ln()).floor();
    if x.is_finite() && x >= 0.0 {
        x as u64
    } else {
        u64::MAX
    }
}
