//! Mapping (configuration, arrival slot) to a concrete transmission plan.
//!
//! The three CG schemes differ in where the UE may begin and in how RVs bind:
//!
//! - `BaselineFirstTo` transmits all K repetitions from the first TO or
//!   nothing at all in that period.
//! - `BaselineStartAtRv0` may begin at any TO whose *configured* RV is 0 and
//!   then follows the TOs' configured RVs (pattern bound to TO positions).
//! - `FlexibleOffset` may begin at any TO; the pattern is anchored to the
//!   transmissions, so the first repetition always carries RV 0.
//!
//! When a period yields zero repetitions the UE may defer whole periods (up
//! to `max_periods_deferral`); the latency budget keeps running from the true
//! arrival. `SharedAssist` instead tops the CG repetitions up to K on a
//! shared band after a fixed LBT delay and never defers. `MultiConfig` picks
//! the member configuration that can begin transmitting soonest.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CgConfig, SchemeKind, SharedParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("scheme {0} is not handled by this planner")]
    UnsupportedScheme(&'static str),
    #[error("shared assist requires T = K, got T = {t}, K = {k}")]
    SharedAssistRequiresTEqualsK { t: usize, k: u32 },
    #[error("multi-config requires at least one member config")]
    EmptyConfigList,
}

/// Resource a repetition is sent on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResourceKind {
    CgResource,
    SharedResource,
}

/// One planned repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedRep {
    pub slot: u64,
    pub resource: ResourceKind,
    pub rv: u8,
}

/// The repetitions planned for one packet. Slots are strictly increasing,
/// there are at most K of them and all lie in `[arrival, arrival + D)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TransmissionPlan {
    pub repetitions: Vec<PlannedRep>,
    /// Whole periods waited before the first repetition.
    pub deferred_periods: u32,
    /// Index of the member configuration used (multi-config only).
    pub chosen_config: Option<usize>,
}

impl TransmissionPlan {
    pub fn is_empty(&self) -> bool {
        self.repetitions.is_empty()
    }

    pub fn cg_count(&self) -> usize {
        self.repetitions
            .iter()
            .filter(|rep| rep.resource == ResourceKind::CgResource)
            .count()
    }

    pub fn shared_count(&self) -> usize {
        self.repetitions.len() - self.cg_count()
    }

    pub fn first_slot(&self) -> Option<u64> {
        self.repetitions.first().map(|rep| rep.slot)
    }
}

/// Candidate CG repetitions for a single period under one of the three CG
/// schemes. `ready` is the slot from which the data can be transmitted
/// (the arrival, or the period start when deferred); repetitions at or past
/// `window_end` are dropped.
fn cg_reps_in_period(
    scheme: &SchemeKind,
    config: &CgConfig,
    period_index: u64,
    ready: u64,
    window_end: u64,
) -> Vec<PlannedRep> {
    let tos = config.tos_in_period(period_index);
    let k = config.rep_count as usize;
    let pattern = &config.rv_pattern;

    let planned: Vec<PlannedRep> = match scheme {
        SchemeKind::BaselineFirstTo => {
            // All K repetitions from the first TO, or nothing this period.
            match tos.first() {
                Some(&(first_slot, _)) if ready <= first_slot => tos
                    .iter()
                    .take(k)
                    .map(|&(slot, position)| PlannedRep {
                        slot,
                        resource: ResourceKind::CgResource,
                        rv: pattern.rv_at(position),
                    })
                    .collect(),
                _ => Vec::new(),
            }
        }
        SchemeKind::BaselineStartAtRv0 => {
            let start = tos
                .iter()
                .position(|&(slot, position)| slot >= ready && pattern.rv_at(position) == 0);
            match start {
                Some(start) => tos[start..]
                    .iter()
                    .take(k)
                    .map(|&(slot, position)| PlannedRep {
                        slot,
                        resource: ResourceKind::CgResource,
                        rv: pattern.rv_at(position),
                    })
                    .collect(),
                None => Vec::new(),
            }
        }
        SchemeKind::FlexibleOffset => {
            let start = tos.iter().position(|&(slot, _)| slot >= ready);
            match start {
                Some(start) => tos[start..]
                    .iter()
                    .take(k)
                    .enumerate()
                    .map(|(rep_index, &(slot, _))| PlannedRep {
                        slot,
                        resource: ResourceKind::CgResource,
                        rv: pattern.rv_at(rep_index),
                    })
                    .collect(),
                None => Vec::new(),
            }
        }
        _ => Vec::new(),
    };

    planned
        .into_iter()
        .filter(|rep| rep.slot < window_end)
        .collect()
}

/// Plans one packet under a pure CG scheme (`BaselineFirstTo`,
/// `BaselineStartAtRv0` or `FlexibleOffset`), deferring whole periods when a
/// period yields zero repetitions.
pub fn plan_cg(
    scheme: &SchemeKind,
    config: &CgConfig,
    arrival: u64,
) -> Result<TransmissionPlan, PlanError> {
    if !matches!(
        scheme,
        SchemeKind::BaselineFirstTo | SchemeKind::BaselineStartAtRv0 | SchemeKind::FlexibleOffset
    ) {
        return Err(PlanError::UnsupportedScheme(scheme.name()));
    }
    let arrival_period = arrival / config.period_slots;
    let window_end = arrival + config.latency_budget_slots;
    for deferred in 0..=config.max_periods_deferral {
        let period = arrival_period + deferred as u64;
        let ready = if deferred == 0 {
            arrival
        } else {
            period * config.period_slots
        };
        let repetitions = cg_reps_in_period(scheme, config, period, ready, window_end);
        if !repetitions.is_empty() {
            return Ok(TransmissionPlan {
                repetitions,
                deferred_periods: deferred,
                chosen_config: None,
            });
        }
    }
    Ok(TransmissionPlan::default())
}

/// Shared repetitions continuing a CG part: `K - K_CG` consecutive slots on
/// the shared band, starting one LBT delay after the CG part ends (or after
/// `ready` when nothing was sent on CG), with RVs continuing the pattern.
fn shared_top_up(
    config: &CgConfig,
    shared: &SharedParams,
    cg_part: &[PlannedRep],
    ready: u64,
    window_end: u64,
) -> Vec<PlannedRep> {
    let k = config.rep_count as usize;
    let k_cg = cg_part.len();
    let start =
        cg_part.last().map_or(ready, |rep| rep.slot.max(ready)) + shared.lbt_delay_slots + 1;
    (0..k.saturating_sub(k_cg) as u64)
        .map(|j| PlannedRep {
            slot: start + j,
            resource: ResourceKind::SharedResource,
            rv: config.rv_pattern.rv_at(k_cg + j as usize),
        })
        .filter(|rep| rep.slot < window_end)
        .collect()
}

/// Plans one packet under the shared-spectrum assist scheme: a flexible CG
/// part over the K allocated TOs, then the remaining `K - K_CG` repetitions
/// on the shared band. The shared band replaces deferral, so the CG part
/// never waits for the next period. The availability mask does not apply to
/// shared slots (different band).
pub fn plan_shared_assist(
    config: &CgConfig,
    shared: &SharedParams,
    arrival: u64,
) -> Result<TransmissionPlan, PlanError> {
    if config.to_count() != config.rep_count as usize {
        return Err(PlanError::SharedAssistRequiresTEqualsK {
            t: config.to_count(),
            k: config.rep_count,
        });
    }
    let period = arrival / config.period_slots;
    let window_end = arrival + config.latency_budget_slots;
    let mut repetitions = cg_reps_in_period(
        &SchemeKind::FlexibleOffset,
        config,
        period,
        arrival,
        window_end,
    );
    repetitions.extend(shared_top_up(
        config,
        shared,
        &repetitions,
        arrival,
        window_end,
    ));
    Ok(TransmissionPlan {
        repetitions,
        deferred_periods: 0,
        chosen_config: None,
    })
}

/// Candidate repetitions of one multi-config member for one period.
fn member_reps_in_period(
    member: &CgConfig,
    period_index: u64,
    ready: u64,
    window_end: u64,
) -> Vec<PlannedRep> {
    match &member.scheme {
        SchemeKind::SharedAssist(shared) => {
            let mut reps = cg_reps_in_period(
                &SchemeKind::FlexibleOffset,
                member,
                period_index,
                ready,
                window_end,
            );
            reps.extend(shared_top_up(member, shared, &reps, ready, window_end));
            reps
        }
        scheme => cg_reps_in_period(scheme, member, period_index, ready, window_end),
    }
}

/// Plans one packet over several staggered configurations: the UE picks the
/// member that can begin transmitting soonest (ties go to the lowest index)
/// and uses only that member's resources. Deferral applies at this level when
/// no member can transmit in the arrival period.
pub fn plan_multi_config(
    members: &[CgConfig],
    arrival: u64,
) -> Result<TransmissionPlan, PlanError> {
    let first = members.first().ok_or(PlanError::EmptyConfigList)?;
    let period_slots = first.period_slots;
    let arrival_period = arrival / period_slots;
    let max_deferral = members
        .iter()
        .map(|member| member.max_periods_deferral)
        .max()
        .unwrap_or(0);

    for deferred in 0..=max_deferral {
        let period = arrival_period + deferred as u64;
        let ready = if deferred == 0 {
            arrival
        } else {
            period * period_slots
        };
        let mut best: Option<(u64, usize, Vec<PlannedRep>)> = None;
        for (index, member) in members.iter().enumerate() {
            if deferred > member.max_periods_deferral {
                continue;
            }
            let window_end = arrival + member.latency_budget_slots;
            let reps = member_reps_in_period(member, period, ready, window_end);
            if let Some(first_slot) = reps.first().map(|rep| rep.slot) {
                if best.as_ref().is_none_or(|(slot, _, _)| first_slot < *slot) {
                    best = Some((first_slot, index, reps));
                }
            }
        }
        if let Some((_, index, repetitions)) = best {
            return Ok(TransmissionPlan {
                repetitions,
                deferred_periods: deferred,
                chosen_config: Some(index),
            });
        }
    }
    Ok(TransmissionPlan::default())
}

/// Plans one packet under whatever scheme the configuration carries.
pub fn plan(config: &CgConfig, arrival: u64) -> Result<TransmissionPlan, PlanError> {
    match &config.scheme {
        SchemeKind::BaselineFirstTo
        | SchemeKind::BaselineStartAtRv0
        | SchemeKind::FlexibleOffset => plan_cg(&config.scheme, config, arrival),
        SchemeKind::SharedAssist(shared) => plan_shared_assist(config, shared, arrival),
        SchemeKind::MultiConfig(members) => plan_multi_config(members, arrival),
    }
}

/// Allocated TOs of the arrival's period that elapse unused before the packet
/// can first be served: `i - 1` for an arrival mapped to the i-th TO, or all
/// T when the period has no arrival or the arrival comes after the last TO.
/// For multi-config, all non-chosen members waste their full allocation.
pub fn wasted_tos(
    plan: &TransmissionPlan,
    config: &CgConfig,
    arrival: Option<u64>,
    period_index: u64,
) -> u64 {
    if let SchemeKind::MultiConfig(members) = &config.scheme {
        let chosen = if plan.deferred_periods == 0 {
            plan.chosen_config
        } else {
            None
        };
        return members
            .iter()
            .enumerate()
            .map(|(index, member)| {
                if chosen == Some(index) {
                    wasted_in_single(member, arrival, period_index)
                } else {
                    member.to_count() as u64
                }
            })
            .sum();
    }
    wasted_in_single(config, arrival, period_index)
}

fn wasted_in_single(config: &CgConfig, arrival: Option<u64>, period_index: u64) -> u64 {
    match arrival {
        None => config.to_count() as u64,
        Some(arrival) => {
            let offset = arrival - period_index * config.period_slots;
            config.to_offsets.iter().filter(|&&to| to < offset).count() as u64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_offsets, CollisionSpec, RvPattern};

    fn config(offsets: Vec<u64>, k: u32, pattern: Vec<u8>, scheme: SchemeKind) -> CgConfig {
        CgConfig {
            period_slots: 10,
            to_offsets: offsets,
            rep_count: k,
            rv_pattern: RvPattern::new(pattern).unwrap(),
            scheme,
            latency_budget_slots: 10,
            max_periods_deferral: 1,
            availability_mask: Default::default(),
        }
    }

    fn slots(plan: &TransmissionPlan) -> Vec<u64> {
        plan.repetitions.iter().map(|rep| rep.slot).collect()
    }

    fn rvs(plan: &TransmissionPlan) -> Vec<u8> {
        plan.repetitions.iter().map(|rep| rep.rv).collect()
    }

    #[test]
    fn first_to_misses_late_arrival_and_defers() {
        let cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 2, 3, 1],
            SchemeKind::BaselineFirstTo,
        );
        let plan = plan_cg(&cfg.scheme, &cfg, 2).unwrap();
        // Nothing in period 0; the deferred attempt runs in period 1 within
        // the remaining budget [2, 12).
        assert!(plan.repetitions.iter().all(|rep| rep.slot >= 10));
        assert_eq!(plan.deferred_periods, 1);
        assert_eq!(slots(&plan), vec![10, 11]);

        let mut no_defer = cfg.clone();
        no_defer.max_periods_deferral = 0;
        let plan = plan_cg(&no_defer.scheme, &no_defer, 2).unwrap();
        assert!(plan.is_empty());
    }

    #[test]
    fn first_to_on_time_plans_all_k() {
        let cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 2, 3, 1],
            SchemeKind::BaselineFirstTo,
        );
        let plan = plan_cg(&cfg.scheme, &cfg, 0).unwrap();
        assert_eq!(slots(&plan), vec![0, 1, 2, 3]);
        assert_eq!(rvs(&plan), vec![0, 2, 3, 1]);
    }

    #[test]
    fn start_at_rv0_waits_for_a_self_decodable_to() {
        let cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 3, 0, 3],
            SchemeKind::BaselineStartAtRv0,
        );
        let plan = plan_cg(&cfg.scheme, &cfg, 1).unwrap();
        assert_eq!(slots(&plan), vec![2, 3]);
        assert_eq!(rvs(&plan), vec![0, 3]);
        assert_eq!(plan.deferred_periods, 0);
    }

    #[test]
    fn flexible_anchors_the_pattern_to_the_first_transmission() {
        let cfg = config(
            generate_offsets(6, 0, 0),
            4,
            vec![0, 2, 3, 1],
            SchemeKind::FlexibleOffset,
        );
        let plan = plan_cg(&cfg.scheme, &cfg, 2).unwrap();
        assert_eq!(slots(&plan), vec![2, 3, 4, 5]);
        assert_eq!(rvs(&plan), vec![0, 2, 3, 1]);

        let plan = plan_cg(&cfg.scheme, &cfg, 4).unwrap();
        assert_eq!(slots(&plan), vec![4, 5]);
        assert_eq!(rvs(&plan), vec![0, 2]);
    }

    #[test]
    fn budget_drops_late_repetitions() {
        let mut cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 2, 3, 1],
            SchemeKind::FlexibleOffset,
        );
        cfg.latency_budget_slots = 2;
        let plan = plan_cg(&cfg.scheme, &cfg, 1).unwrap();
        assert_eq!(slots(&plan), vec![1, 2]);
    }

    #[test]
    fn masked_tos_are_skipped_without_shifting_rvs() {
        let mut cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 3, 0, 3],
            SchemeKind::BaselineStartAtRv0,
        );
        cfg.availability_mask.insert(0);
        // Positions keep their configured RVs, so the first usable RV-0 TO is
        // position 2 at slot 2.
        let plan = plan_cg(&cfg.scheme, &cfg, 0).unwrap();
        assert_eq!(slots(&plan), vec![2, 3]);
        assert_eq!(rvs(&plan), vec![0, 3]);
    }

    #[test]
    fn plan_cg_rejects_non_cg_schemes() {
        let shared = SharedParams {
            lbt_delay_slots: 0,
            collision: CollisionSpec::Probability(0.0),
        };
        let cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 2, 3, 1],
            SchemeKind::SharedAssist(shared.clone()),
        );
        assert_eq!(
            plan_cg(&cfg.scheme, &cfg, 0),
            Err(PlanError::UnsupportedScheme("shared_assist"))
        );
    }

    fn shared_config(lbt: u64, budget: u64) -> (CgConfig, SharedParams) {
        let shared = SharedParams {
            lbt_delay_slots: lbt,
            collision: CollisionSpec::Probability(0.2),
        };
        let mut cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 2, 3, 1],
            SchemeKind::SharedAssist(shared.clone()),
        );
        cfg.latency_budget_slots = budget;
        (cfg, shared)
    }

    #[test]
    fn shared_assist_tops_up_to_k() {
        let (cfg, shared) = shared_config(0, 10);
        let plan = plan_shared_assist(&cfg, &shared, 2).unwrap();
        assert_eq!(slots(&plan), vec![2, 3, 4, 5]);
        assert_eq!(rvs(&plan), vec![0, 2, 3, 1]);
        assert_eq!(plan.cg_count(), 2);
        assert_eq!(plan.shared_count(), 2);
    }

    #[test]
    fn shared_assist_unused_when_on_time() {
        let (cfg, shared) = shared_config(0, 10);
        let plan = plan_shared_assist(&cfg, &shared, 0).unwrap();
        assert_eq!(plan.cg_count(), 4);
        assert_eq!(plan.shared_count(), 0);
    }

    #[test]
    fn shared_assist_respects_lbt_and_budget() {
        let (cfg, shared) = shared_config(2, 4);
        let plan = plan_shared_assist(&cfg, &shared, 2).unwrap();
        // Window [2, 6): the shared repetition would land at slot 6.
        assert_eq!(slots(&plan), vec![2, 3]);
        assert_eq!(plan.shared_count(), 0);
    }

    #[test]
    fn shared_assist_requires_t_equals_k() {
        let shared = SharedParams {
            lbt_delay_slots: 0,
            collision: CollisionSpec::Probability(0.0),
        };
        let cfg = config(
            generate_offsets(6, 0, 0),
            4,
            vec![0, 2, 3, 1],
            SchemeKind::SharedAssist(shared.clone()),
        );
        assert_eq!(
            plan_shared_assist(&cfg, &shared, 0),
            Err(PlanError::SharedAssistRequiresTEqualsK { t: 6, k: 4 })
        );
    }

    fn two_member_setup() -> Vec<CgConfig> {
        let mut member_a = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 2, 3, 1],
            SchemeKind::BaselineFirstTo,
        );
        member_a.max_periods_deferral = 0;
        let mut member_b = member_a.clone();
        member_b.to_offsets = vec![5, 6, 7, 8];
        vec![member_a, member_b]
    }

    #[test]
    fn multi_config_picks_the_nearest_usable_member() {
        let members = two_member_setup();
        let plan = plan_multi_config(&members, 3).unwrap();
        assert_eq!(plan.chosen_config, Some(1));
        assert_eq!(plan.first_slot(), Some(5));
    }

    #[test]
    fn multi_config_prefers_the_earliest_start() {
        let members = two_member_setup();
        let plan = plan_multi_config(&members, 0).unwrap();
        assert_eq!(plan.chosen_config, Some(0));
        assert_eq!(plan.first_slot(), Some(0));
    }

    #[test]
    fn multi_config_with_nothing_left_yields_empty_plan() {
        let members = two_member_setup();
        let plan = plan_multi_config(&members, 9).unwrap();
        assert!(plan.is_empty());
    }

    #[test]
    fn multi_config_defers_when_members_allow_it() {
        let mut members = two_member_setup();
        for member in &mut members {
            member.max_periods_deferral = 1;
        }
        let plan = plan_multi_config(&members, 9).unwrap();
        assert_eq!(plan.deferred_periods, 1);
        assert_eq!(plan.chosen_config, Some(0));
        assert_eq!(plan.first_slot(), Some(10));
    }

    #[test]
    fn empty_member_list_is_an_error() {
        assert_eq!(plan_multi_config(&[], 0), Err(PlanError::EmptyConfigList));
    }

    #[test]
    fn wastage_counts_tos_before_the_arrival() {
        let cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 2, 3, 1],
            SchemeKind::FlexibleOffset,
        );
        let on_time = plan(&cfg, 0).unwrap();
        assert_eq!(wasted_tos(&on_time, &cfg, Some(0), 0), 0);
        let late = plan(&cfg, 2).unwrap();
        assert_eq!(wasted_tos(&late, &cfg, Some(2), 0), 2);
        assert_eq!(wasted_tos(&TransmissionPlan::default(), &cfg, None, 0), 4);
    }

    #[test]
    fn wastage_after_the_last_to_is_the_full_allocation() {
        let cfg = config(
            vec![0, 1, 2, 3],
            4,
            vec![0, 2, 3, 1],
            SchemeKind::FlexibleOffset,
        );
        let missed = plan(&cfg, 9).unwrap();
        assert_eq!(wasted_tos(&missed, &cfg, Some(9), 0), 4);
    }

    #[test]
    fn multi_config_wastage_charges_unused_members() {
        let members = two_member_setup();
        let mut outer = members[0].clone();
        outer.scheme = SchemeKind::MultiConfig(members);
        let late = plan(&outer, 3).unwrap();
        // Member 0 is skipped entirely (4 TOs); member 1 starts at its first TO.
        assert_eq!(wasted_tos(&late, &outer, Some(3), 0), 4);
        let on_time = plan(&outer, 0).unwrap();
        assert_eq!(wasted_tos(&on_time, &outer, Some(0), 0), 4);
        assert_eq!(wasted_tos(&TransmissionPlan::default(), &outer, None, 0), 8);
    }
}
