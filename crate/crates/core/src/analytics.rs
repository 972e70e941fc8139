//! Exact reliability, TO dimensioning and expected resource wastage.
//!
//! Reliability is computed by enumerating the arrival law slot by slot,
//! planning each arrival exactly as the simulator would, and weighting the
//! plan's success probability, conditioned on a packet arriving at all.
//! Under `AnySuccess` the success of a plan with
//! `n` CG and `m` shared repetitions is the closed form
//! `1 - epsilon^n * f^m` with `f = 1 - (1-collision)(1-epsilon)`; under
//! `RvAware` it is an exhaustive sum over the `2^(n+m)` received subsets.
//! Planning (including deferral) is shared with the simulator so the two
//! stay comparable; the reception model is where they differ.

use thiserror::Error;

use crate::model::{CgConfig, RvPattern, SchemeKind};
use crate::phy::{ChannelParams, DecodeModel, RvPredicate};
use crate::schemes::{self, PlanError, TransmissionPlan};
use crate::traffic::{TrafficError, TrafficModel};

/// Enumerating received subsets is capped at this many allocated TOs.
pub const ENUMERATION_MAX_TOS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("invalid config: {0:?}")]
    InvalidConfig(Vec<String>),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("rv-aware enumeration supports at most {max} TOs, config allocates {t}")]
    EnumerationBound { t: usize, max: usize },
    #[error("target reliability {0} must lie in [0, 1)")]
    InvalidTarget(f64),
    #[error("no TO count up to {r_max} reaches the target reliability")]
    Infeasible { r_max: u32 },
    #[error("explicit per-TO pmf cannot be re-dimensioned; use a slot-level traffic law")]
    UnsupportedTraffic,
    #[error("pmf is not normalised: p_none + sum(p) = {0}")]
    UnnormalisedPmf(f64),
    #[error("pmf lists {got} probabilities for {expected} TOs")]
    PmfLengthMismatch { expected: usize, got: usize },
}

/// One enumerated arrival case.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalCase {
    /// Arrival offset within the period.
    pub arrival_offset: u64,
    /// 1-based index of the earliest configured TO the arrival can use;
    /// `None` when it comes after the last TO.
    pub to_index: Option<usize>,
    /// Probability of this arrival offset, conditioned on a packet arriving
    /// at all (the cases sum to 1).
    pub probability: f64,
    pub cg_reps: usize,
    pub shared_reps: usize,
    /// Success probability conditioned on this arrival.
    pub success: f64,
}

/// Exact reliability with its per-arrival breakdown.
///
/// Reliability is the delivery probability of a packet that arrives, exactly
/// the probability-weighted sum of the cases' successes: no-arrival periods
/// count toward wastage, never toward reliability, mirroring the simulator's
/// `delivered / attempted` ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityResult {
    pub reliability: f64,
    /// Probability that a period carries no packet at all.
    pub p_no_arrival: f64,
    pub breakdown: Vec<ArrivalCase>,
}

/// Success probability of one plan under the channel's decode model.
fn plan_success(plan: &TransmissionPlan, channel: &ChannelParams) -> f64 {
    match &channel.decode_model {
        DecodeModel::AnySuccess => {
            let all_lost: f64 = plan
                .repetitions
                .iter()
                .map(|rep| 1.0 - channel.rep_success_prob(rep.resource))
                .product();
            if plan.is_empty() {
                0.0
            } else {
                1.0 - all_lost
            }
        }
        DecodeModel::RvAware(predicate) => enumerate_success(plan, channel, predicate),
    }
}

/// Sums the probability of every received subset that satisfies the decode
/// predicate. The predicate is monotone, so a subset decodes iff its final
/// RV counts satisfy it.
fn enumerate_success(
    plan: &TransmissionPlan,
    channel: &ChannelParams,
    predicate: &RvPredicate,
) -> f64 {
    let reps = &plan.repetitions;
    let success_probs: Vec<f64> = reps
        .iter()
        .map(|rep| channel.rep_success_prob(rep.resource))
        .collect();
    let mut total = 0.0;
    for mask in 0u32..(1 << reps.len()) {
        let mut weight = 1.0;
        let mut counts = [0u32; 4];
        for (index, rep) in reps.iter().enumerate() {
            if mask & (1 << index) != 0 {
                weight *= success_probs[index];
                counts[rep.rv as usize] += 1;
            } else {
                weight *= 1.0 - success_probs[index];
            }
        }
        if predicate.satisfied(&counts) {
            total += weight;
        }
    }
    total
}

/// Exact transmission reliability for the config's scheme under the given
/// arrival law, including deferral within the latency budget.
pub fn reliability_exact(
    config: &CgConfig,
    traffic: &TrafficModel,
    channel: &ChannelParams,
) -> Result<ReliabilityResult, AnalyticsError> {
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(AnalyticsError::InvalidConfig(violations));
    }
    if matches!(channel.decode_model, DecodeModel::RvAware(_)) {
        let widest = match &config.scheme {
            SchemeKind::MultiConfig(members) => members
                .iter()
                .map(CgConfig::to_count)
                .max()
                .unwrap_or(config.to_count()),
            _ => config.to_count(),
        };
        if widest > ENUMERATION_MAX_TOS {
            return Err(AnalyticsError::EnumerationBound {
                t: widest,
                max: ENUMERATION_MAX_TOS,
            });
        }
    }

    let (law, p_no_arrival) = traffic.slot_law(config)?;
    let mut breakdown = Vec::with_capacity(law.len());
    let mut delivered_mass = 0.0;
    let mut arrival_mass = 0.0;
    for (arrival_offset, probability) in law {
        if probability == 0.0 {
            continue;
        }
        let plan = schemes::plan(config, arrival_offset)?;
        let success = plan_success(&plan, channel);
        delivered_mass += probability * success;
        arrival_mass += probability;
        breakdown.push(ArrivalCase {
            arrival_offset,
            to_index: config
                .to_offsets
                .iter()
                .position(|&to| to >= arrival_offset)
                .map(|index| index + 1),
            probability,
            cg_reps: plan.cg_count(),
            shared_reps: plan.shared_count(),
            success,
        });
    }
    // Condition on a packet existing, as the simulator's delivered/attempted
    // ratio does.
    let reliability = if arrival_mass > 0.0 {
        delivered_mass / arrival_mass
    } else {
        0.0
    };
    if arrival_mass > 0.0 {
        for case in &mut breakdown {
            case.probability /= arrival_mass;
        }
    }
    Ok(ReliabilityResult {
        reliability,
        p_no_arrival,
        breakdown,
    })
}

/// A dimensioning problem: find the smallest TO window reaching the target.
#[derive(Debug, Clone)]
pub struct DimensionRequest {
    /// CG scheme evaluated for each candidate window (not multi-config).
    pub scheme: SchemeKind,
    pub rv_pattern: RvPattern,
    pub traffic: TrafficModel,
    pub channel: ChannelParams,
    /// Target reliability in `[0, 1)`.
    pub target: f64,
    /// Smallest candidate window (and repetition count) to consider.
    pub k_floor: u32,
    /// Largest candidate window to consider.
    pub r_max: u32,
    /// Period floor; the period grows with the window when `r` exceeds it.
    pub min_period: u64,
    pub max_periods_deferral: u32,
}

/// Builds the candidate config for window size `r`: contiguous offsets
/// `[0..r)` with the repetition count tracking the window.
fn candidate_config(request: &DimensionRequest, r: u32) -> CgConfig {
    let period = request.min_period.max(r as u64);
    CgConfig {
        period_slots: period,
        to_offsets: (0..r as u64).collect(),
        rep_count: r,
        rv_pattern: request.rv_pattern.clone(),
        scheme: request.scheme.clone(),
        latency_budget_slots: period,
        max_periods_deferral: request.max_periods_deferral,
        availability_mask: Default::default(),
    }
}

/// Smallest TO count `r` in `[k_floor, r_max]` whose exact reliability meets
/// the target. The search walks upward, so the result is minimal whenever
/// reliability is nondecreasing in `r` (which holds for `FlexibleOffset`).
pub fn dimension_t(request: &DimensionRequest) -> Result<u32, AnalyticsError> {
    if !(0.0..1.0).contains(&request.target) {
        return Err(AnalyticsError::InvalidTarget(request.target));
    }
    if matches!(request.scheme, SchemeKind::MultiConfig(_)) {
        return Err(PlanError::UnsupportedScheme("multi").into());
    }
    if matches!(request.traffic, TrafficModel::ExplicitPmf { .. }) {
        return Err(AnalyticsError::UnsupportedTraffic);
    }
    for r in request.k_floor.max(1)..=request.r_max {
        let config = candidate_config(request, r);
        let result = reliability_exact(&config, &request.traffic, &request.channel)?;
        if result.reliability >= request.target {
            return Ok(r);
        }
    }
    Err(AnalyticsError::Infeasible {
        r_max: request.r_max,
    })
}

/// Expected TOs wasted per period for a whole configuration, by enumerating
/// the arrival law against the same accounting the simulator uses. For a
/// single configuration this equals [`expected_wastage`] over its arrival
/// PMF; for multi-config it also charges the members the packet did not use.
pub fn expected_wastage_exact(
    config: &CgConfig,
    traffic: &TrafficModel,
) -> Result<f64, AnalyticsError> {
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(AnalyticsError::InvalidConfig(violations));
    }
    let (law, p_none) = traffic.slot_law(config)?;
    let all_tos = match &config.scheme {
        SchemeKind::MultiConfig(members) => {
            members.iter().map(|member| member.to_count() as f64).sum()
        }
        _ => config.to_count() as f64,
    };
    let mut wastage = p_none * all_tos;
    for (arrival_offset, probability) in law {
        let plan = schemes::plan(config, arrival_offset)?;
        wastage += probability * schemes::wasted_tos(&plan, config, Some(arrival_offset), 0) as f64;
    }
    Ok(wastage)
}

/// Expected TOs wasted per period: `p_o * T + sum_i p_i * (i - 1)`.
pub fn expected_wastage(p_none: f64, per_to: &[f64], t: usize) -> Result<f64, AnalyticsError> {
    if per_to.len() != t {
        return Err(AnalyticsError::PmfLengthMismatch {
            expected: t,
            got: per_to.len(),
        });
    }
    let total: f64 = p_none + per_to.iter().sum::<f64>();
    if (total - 1.0).abs() > 1e-9 {
        return Err(AnalyticsError::UnnormalisedPmf(total));
    }
    Ok(p_none * t as f64
        + per_to
            .iter()
            .enumerate()
            .map(|(index, p)| p * index as f64)
            .sum::<f64>())
}
