//! Shared scenario builders for the benchmarks.

use cgsim_core::model::{generate_offsets, CgConfig, RvPattern, SchemeKind};
use cgsim_core::phy::{ChannelParams, DecodeModel, RvPredicate};
use cgsim_core::traffic::TrafficModel;
use cgsim_core::Scenario;

pub fn flexible_config(t: usize, k: u32) -> CgConfig {
    CgConfig {
        period_slots: (t as u64).max(10),
        to_offsets: generate_offsets(t, 0, 0),
        rep_count: k,
        rv_pattern: RvPattern::new(vec![0, 2, 3, 1]).unwrap(),
        scheme: SchemeKind::FlexibleOffset,
        latency_budget_slots: (t as u64).max(10),
        max_periods_deferral: 1,
        availability_mask: Default::default(),
    }
}

pub fn mc_scenario(packets: u64) -> Scenario {
    Scenario {
        config: flexible_config(6, 4),
        traffic: TrafficModel::UniformOverSlots { lo: 0, hi: 5 },
        channel: ChannelParams {
            epsilon: 0.1,
            shared_collision: 0.0,
            decode_model: DecodeModel::AnySuccess,
        },
        slot_duration_ms: 1.0,
        packets,
        master_seed: 1,
    }
}

pub fn rv_aware_channel() -> ChannelParams {
    ChannelParams {
        epsilon: 0.1,
        shared_collision: 0.0,
        decode_model: DecodeModel::RvAware(RvPredicate::default()),
    }
}
