//! Core domain types and transmission-occasion (TO) geometry.
//!
//! A configured grant allocates `T` TOs per period of `P` slots; the UE sends
//! up to `K` redundant repetitions on them, tagged with redundancy versions
//! (RVs) drawn from a configured pattern. An optional availability mask
//! models TDD patterns: TOs falling on blocked slot residues are discounted.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Error raised when constructing an [`RvPattern`] from invalid ids.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("rv pattern must be non-empty")]
    Empty,
    #[error("rv id {0} outside the valid range 0..=3")]
    InvalidId(u8),
    #[error("rv pattern must start with rv 0")]
    MustStartWithRv0,
}

/// A redundancy-version pattern such as `(0,0,0,0)`, `(0,3,0,3)` or
/// `(0,2,3,1)`.
///
/// Patterns are non-empty, contain only ids in `0..=3` and start with RV 0
/// (the self-decodable version). A pattern shorter than the repetition count
/// is extended cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RvPattern {
    ids: Vec<u8>,
}

impl RvPattern {
    pub fn new(ids: impl Into<Vec<u8>>) -> Result<Self, PatternError> {
        let ids = ids.into();
        if ids.is_empty() {
            return Err(PatternError::Empty);
        }
        if let Some(&bad) = ids.iter().find(|&&id| id > 3) {
            return Err(PatternError::InvalidId(bad));
        }
        if ids[0] != 0 {
            return Err(PatternError::MustStartWithRv0);
        }
        Ok(Self { ids })
    }

    pub fn ids(&self) -> &[u8] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// RV at `position`, extending the pattern cyclically beyond its length.
    pub fn rv_at(&self, position: usize) -> u8 {
        self.ids[position % self.ids.len()]
    }
}

/// Collision behaviour of the shared band: an explicit probability or the
/// slotted-ALOHA contention pair (contenders, per-slot transmit probability).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CollisionSpec {
    Probability(f64),
    Contention { contenders: u32, tx_prob: f64 },
}

/// Shared-spectrum assist parameters: the fixed Listen-Before-Talk delay paid
/// before the first shared repetition, and the collision model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedParams {
    pub lbt_delay_slots: u64,
    pub collision: CollisionSpec,
}

/// Scheduling scheme applied to a configuration's TOs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SchemeKind {
    /// 3GPP scheme 1: the UE starts at the first TO or not at all.
    BaselineFirstTo,
    /// 3GPP scheme 2: the UE may start at any TO whose configured RV is 0 and
    /// continues on the remaining TOs with their configured RVs.
    BaselineStartAtRv0,
    /// Enhanced scheme: the UE starts at any TO and the RV pattern is anchored
    /// to the transmissions rather than the TOs.
    FlexibleOffset,
    /// K TOs on licensed CG resources, with missed repetitions topped up on a
    /// shared band after an LBT delay.
    SharedAssist(SharedParams),
    /// Several staggered configurations; the UE picks the nearest one it can
    /// still use.
    MultiConfig(Vec<CgConfig>),
}

impl SchemeKind {
    /// Short stable name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::BaselineFirstTo => "first_to",
            SchemeKind::BaselineStartAtRv0 => "start_at_rv0",
            SchemeKind::FlexibleOffset => "flexible",
            SchemeKind::SharedAssist(_) => "shared_assist",
            SchemeKind::MultiConfig(_) => "multi",
        }
    }
}

/// One configured-grant configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgConfig {
    /// CG period P in slots.
    pub period_slots: u64,
    /// TO offsets within the period, strictly increasing, all `< P`.
    pub to_offsets: Vec<u64>,
    /// Number of repetitions K the UE transmits per packet.
    pub rep_count: u32,
    pub rv_pattern: RvPattern,
    pub scheme: SchemeKind,
    /// Latency budget D in slots; repetitions at or beyond `arrival + D` are
    /// dropped and a decode must land inside the window to count.
    pub latency_budget_slots: u64,
    /// Periods the UE may wait when a period yields zero repetitions.
    pub max_periods_deferral: u32,
    /// Blocked slot residues mod P (e.g. TDD downlink slots). TOs on blocked
    /// residues are dropped, not rescheduled; empty set means no mask.
    pub availability_mask: BTreeSet<u64>,
}

impl CgConfig {
    /// Number of allocated TOs per period (T).
    pub fn to_count(&self) -> usize {
        self.to_offsets.len()
    }

    /// Checks every invariant and returns one description per violation.
    /// An empty list means the configuration is valid. Violations are data,
    /// not failures: callers decide whether to abort.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.period_slots == 0 {
            violations.push("period must be positive".to_string());
        }
        if self.to_offsets.is_empty() {
            violations.push("at least one TO offset is required".to_string());
        }
        for pair in self.to_offsets.windows(2) {
            if pair[0] >= pair[1] {
                violations.push(format!(
                    "offsets must be strictly increasing ({} then {})",
                    pair[0], pair[1]
                ));
            }
        }
        for &offset in &self.to_offsets {
            if offset >= self.period_slots {
                violations.push(format!("offset {} >= period {}", offset, self.period_slots));
            }
        }
        if self.rep_count == 0 {
            violations.push("K must be positive".to_string());
        }
        if self.rep_count as usize > self.to_offsets.len() {
            violations.push("K exceeds T".to_string());
        }
        if self.latency_budget_slots == 0 {
            violations.push("latency budget must be positive".to_string());
        }
        for &residue in &self.availability_mask {
            if residue >= self.period_slots {
                violations.push(format!(
                    "mask residue {} >= period {}",
                    residue, self.period_slots
                ));
            }
        }
        if let SchemeKind::MultiConfig(members) = &self.scheme {
            self.validate_members(members, &mut violations);
        }
        violations
    }

    fn validate_members(&self, members: &[CgConfig], violations: &mut Vec<String>) {
        if members.len() < 2 {
            violations.push("multi-config requires at least 2 member configs".to_string());
        }
        let mut first_tos = BTreeSet::new();
        for (index, member) in members.iter().enumerate() {
            if matches!(member.scheme, SchemeKind::MultiConfig(_)) {
                violations.push(format!("member {index} must not itself be multi-config"));
                continue;
            }
            if member.period_slots != self.period_slots {
                violations.push(format!(
                    "member {index} period {} differs from {}",
                    member.period_slots, self.period_slots
                ));
            }
            if let Some(&first) = member.to_offsets.first() {
                if !first_tos.insert(first) {
                    violations.push(format!("member {index} duplicates first-TO offset {first}"));
                }
            }
            for violation in member.validate() {
                violations.push(format!("member {index}: {violation}"));
            }
        }
    }

    /// TOs of one period that survive the availability mask, as pairs of
    /// (absolute slot, pattern position). Pattern positions index the original
    /// T offsets, so masking leaves the RV-to-position binding untouched.
    pub fn tos_in_period(&self, period_index: u64) -> Vec<(u64, usize)> {
        let base = period_index * self.period_slots;
        self.to_offsets
            .iter()
            .enumerate()
            .filter(|(_, &offset)| !self.availability_mask.contains(&offset))
            .map(|(position, &offset)| (base + offset, position))
            .collect()
    }
}

/// Evenly spaced TO offsets: `start, start + (gap+1), ...` for `count` TOs.
/// `gap = 0` reproduces the consecutive 3GPP layout.
pub fn generate_offsets(count: usize, gap: u64, start: u64) -> Vec<u64> {
    (0..count as u64).map(|j| start + j * (gap + 1)).collect()
}
