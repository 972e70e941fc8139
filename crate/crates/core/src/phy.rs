//! Per-repetition reception draws and decode predicates.
//!
//! A CG repetition is lost with probability `epsilon` (flat-fading link
//! abstraction). A shared-band repetition additionally survives contention
//! with probability `1 - collision`, where the collision probability follows
//! the slotted-ALOHA law `1 - (1-q)^(N-1)`. Decoding is either `AnySuccess`
//! (one received repetition suffices; admits closed-form reliability) or
//! `RvAware`, which models the RVs' unequal decodability.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::CollisionSpec;
use crate::schemes::{PlannedRep, ResourceKind, TransmissionPlan};

/// One rule of an RV decode table: satisfied once at least `min_total`
/// repetitions are received and, per RV id, at least `min_rv_counts[rv]` of
/// them carry that id. A packet decodes when any rule is satisfied, so the
/// predicate is monotone in the received set by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeRule {
    pub min_rv_counts: [u32; 4],
    pub min_total: u32,
}

/// Configurable RV decodability table.
///
/// The default captures the qualitative 3GPP semantics: RV 0 is
/// self-decodable; RV 3 is almost decodable and suffices together with any
/// second received repetition; RVs 1 and 2 need the other RVs, covered here
/// by requiring all of {1,2,3}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RvPredicate {
    pub rules: Vec<DecodeRule>,
}

impl Default for RvPredicate {
    fn default() -> Self {
        Self {
            rules: vec![
                DecodeRule {
                    min_rv_counts: [1, 0, 0, 0],
                    min_total: 1,
                },
                DecodeRule {
                    min_rv_counts: [0, 0, 0, 1],
                    min_total: 2,
                },
                DecodeRule {
                    min_rv_counts: [0, 1, 1, 1],
                    min_total: 3,
                },
            ],
        }
    }
}

impl RvPredicate {
    /// A predicate that decodes on any single received repetition, making
    /// `RvAware` enumeration reproduce the `AnySuccess` closed form.
    pub fn any_single() -> Self {
        Self {
            rules: vec![DecodeRule {
                min_rv_counts: [0; 4],
                min_total: 1,
            }],
        }
    }

    pub fn satisfied(&self, rv_counts: &[u32; 4]) -> bool {
        let total: u32 = rv_counts.iter().sum();
        self.rules.iter().any(|rule| {
            total >= rule.min_total
                && rule
                    .min_rv_counts
                    .iter()
                    .zip(rv_counts)
                    .all(|(needed, have)| have >= needed)
        })
    }
}

/// Decode model applied to the received repetitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeModel {
    AnySuccess,
    RvAware(RvPredicate),
}

/// Channel and receiver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Per-repetition CG error probability.
    pub epsilon: f64,
    /// Collision probability applied to each shared-band repetition.
    pub shared_collision: f64,
    pub decode_model: DecodeModel,
}

impl ChannelParams {
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if !(0.0..=1.0).contains(&self.epsilon) {
            violations.push(format!("epsilon {} out of range", self.epsilon));
        }
        if !(0.0..=1.0).contains(&self.shared_collision) {
            violations.push(format!(
                "collision probability {} out of range",
                self.shared_collision
            ));
        }
        violations
    }

    /// Probability that one repetition is received.
    pub fn rep_success_prob(&self, resource: ResourceKind) -> f64 {
        match resource {
            ResourceKind::CgResource => 1.0 - self.epsilon,
            ResourceKind::SharedResource => (1.0 - self.shared_collision) * (1.0 - self.epsilon),
        }
    }
}

/// Slotted-ALOHA collision probability seen by one of `contenders` nodes when
/// each of the others transmits in a slot with probability `tx_prob`.
pub fn collision_prob(contenders: u32, tx_prob: f64) -> f64 {
    1.0 - (1.0 - tx_prob).powi(contenders as i32 - 1)
}

/// Resolves a collision specification to a probability.
pub fn resolve_collision(spec: &CollisionSpec) -> f64 {
    match spec {
        CollisionSpec::Probability(p) => *p,
        CollisionSpec::Contention {
            contenders,
            tx_prob,
        } => collision_prob(*contenders, *tx_prob),
    }
}

/// Outcome of transmitting one planned repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepOutcome {
    pub rep: PlannedRep,
    pub received: bool,
}

/// Draws the reception of every repetition in the plan, one uniform draw per
/// repetition in slot order. Draws are independent across repetitions.
pub fn transmit(
    plan: &TransmissionPlan,
    params: &ChannelParams,
    rng: &mut impl Rng,
) -> Vec<RepOutcome> {
    plan.repetitions
        .iter()
        .map(|&rep| {
            let u: f64 = rng.random();
            RepOutcome {
                rep,
                received: u < params.rep_success_prob(rep.resource),
            }
        })
        .collect()
}

/// Scans the outcomes in slot order and returns the slot at which decoding
/// completes, or `None` when the packet cannot be decoded.
pub fn decode(outcomes: &[RepOutcome], model: &DecodeModel) -> Option<u64> {
    match model {
        DecodeModel::AnySuccess => outcomes
            .iter()
            .find(|outcome| outcome.received)
            .map(|outcome| outcome.rep.slot),
        DecodeModel::RvAware(predicate) => {
            let mut counts = [0u32; 4];
            for outcome in outcomes {
                if outcome.received {
                    counts[outcome.rep.rv as usize] += 1;
                    if predicate.satisfied(&counts) {
                        return Some(outcome.rep.slot);
                    }
                }
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CgConfig, RvPattern, SchemeKind};
    use crate::schemes::plan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(epsilon: f64, collision: f64) -> ChannelParams {
        ChannelParams {
            epsilon,
            shared_collision: collision,
            decode_model: DecodeModel::AnySuccess,
        }
    }

    fn test_config() -> CgConfig {
        CgConfig {
            period_slots: 10,
            to_offsets: vec![0, 1, 2, 3],
            rep_count: 4,
            rv_pattern: RvPattern::new(vec![0, 2, 3, 1]).unwrap(),
            scheme: SchemeKind::FlexibleOffset,
            latency_budget_slots: 10,
            max_periods_deferral: 1,
            availability_mask: Default::default(),
        }
    }

    fn rep(slot: u64, rv: u8) -> PlannedRep {
        PlannedRep {
            slot,
            resource: ResourceKind::CgResource,
            rv,
        }
    }

    fn received(reps: &[PlannedRep]) -> Vec<RepOutcome> {
        reps.iter()
            .map(|&rep| RepOutcome {
                rep,
                received: true,
            })
            .collect()
    }

    #[test]
    fn no_contenders_never_collide() {
        assert_eq!(collision_prob(1, 0.5), 0.0);
    }

    #[test]
    fn single_contender_collides_at_its_tx_prob() {
        assert!((collision_prob(2, 0.1) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn aloha_closed_form() {
        assert!((collision_prob(5, 0.2) - 0.5904).abs() < 1e-12);
    }

    #[test]
    fn collision_prob_edges_and_monotonicity() {
        assert_eq!(collision_prob(7, 0.0), 0.0);
        assert_eq!(collision_prob(2, 1.0), 1.0);
        let mut last = 0.0;
        for n in 1..10 {
            let p = collision_prob(n, 0.3);
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn clean_channel_receives_everything() {
        let cfg = test_config();
        let plan = plan(&cfg, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let outcomes = transmit(&plan, &params(0.0, 0.0), &mut rng);
        assert!(outcomes.iter().all(|o| o.received));
        let outcomes = transmit(&plan, &params(1.0, 0.0), &mut rng);
        assert!(outcomes.iter().all(|o| !o.received));
    }

    #[test]
    fn reception_frequency_matches_epsilon() {
        let cfg = test_config();
        let plan = plan(&cfg, 0).unwrap();
        let channel = params(0.1, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut received = 0u64;
        let mut total = 0u64;
        for _ in 0..100_000 {
            for outcome in transmit(&plan, &channel, &mut rng) {
                total += 1;
                received += outcome.received as u64;
            }
        }
        let freq = received as f64 / total as f64;
        assert!((freq - 0.9).abs() < 0.005, "per-rep reception {freq}");
    }

    #[test]
    fn nothing_received_never_decodes() {
        assert_eq!(decode(&[], &DecodeModel::AnySuccess), None);
        assert_eq!(
            decode(&[], &DecodeModel::RvAware(RvPredicate::default())),
            None
        );
    }

    #[test]
    fn rv0_is_self_decodable() {
        let model = DecodeModel::RvAware(RvPredicate::default());
        assert_eq!(decode(&received(&[rep(5, 0)]), &model), Some(5));
    }

    #[test]
    fn rv3_alone_is_not_enough() {
        let model = DecodeModel::RvAware(RvPredicate::default());
        assert_eq!(decode(&received(&[rep(2, 3)]), &model), None);
    }

    #[test]
    fn rv3_plus_any_other_repetition_decodes() {
        let model = DecodeModel::RvAware(RvPredicate::default());
        assert_eq!(decode(&received(&[rep(2, 3), rep(3, 1)]), &model), Some(3));
    }

    #[test]
    fn rvs_one_two_three_together_decode() {
        let model = DecodeModel::RvAware(RvPredicate::default());
        assert_eq!(decode(&received(&[rep(1, 1), rep(2, 2)]), &model), None);
        assert_eq!(
            decode(&received(&[rep(1, 1), rep(2, 2), rep(3, 3)]), &model),
            Some(3)
        );
    }

    #[test]
    fn any_success_decodes_at_the_first_received_slot() {
        let outcomes = vec![
            RepOutcome {
                rep: rep(1, 2),
                received: false,
            },
            RepOutcome {
                rep: rep(2, 3),
                received: true,
            },
            RepOutcome {
                rep: rep(3, 1),
                received: true,
            },
        ];
        assert_eq!(decode(&outcomes, &DecodeModel::AnySuccess), Some(2));
    }

    #[test]
    fn rv_aware_implies_any_success() {
        // Every subset of a 4-rep plan: RvAware decoding must imply at least
        // one reception, and adding a reception never hurts.
        let reps = [rep(0, 0), rep(1, 2), rep(2, 3), rep(3, 1)];
        let rv_model = DecodeModel::RvAware(RvPredicate::default());
        for mask in 0u32..16 {
            let outcomes: Vec<RepOutcome> = reps
                .iter()
                .enumerate()
                .map(|(i, &rep)| RepOutcome {
                    rep,
                    received: mask & (1 << i) != 0,
                })
                .collect();
            let rv = decode(&outcomes, &rv_model);
            let any = decode(&outcomes, &DecodeModel::AnySuccess);
            if let Some(rv_slot) = rv {
                assert!(any.is_some());
                assert!(any.unwrap() <= rv_slot);
            }
            // Monotonicity: flipping one missed repetition to received never
            // loses the decode and never makes it later.
            if let Some(rv_slot) = rv {
                for flip in 0..4 {
                    if mask & (1 << flip) == 0 {
                        let mut more = outcomes.clone();
                        more[flip].received = true;
                        let upgraded = decode(&more, &rv_model);
                        assert!(upgraded.is_some());
                        assert!(upgraded.unwrap() <= rv_slot);
                    }
                }
            }
        }
    }
}
