//! Slot-level simulator and analytics for 5G NR configured-grant (CG) uplink
//! repetition scheduling under semi-deterministic traffic.
//!
//! The crate is organised around the life of one packet:
//!
//! - [`model`] — CG configurations, RV patterns and transmission-occasion
//!   geometry (contiguous, time-gapped, TDD-masked).
//! - [`traffic`] — per-period arrival laws and the arrival PMF over TOs.
//! - [`schemes`] — mapping (config, arrival) to a concrete transmission plan
//!   under the baseline and enhanced scheduling schemes.
//! - [`phy`] — per-repetition success draws, RV-aware decoding and the
//!   slotted-ALOHA collision model for shared-spectrum repetitions.
//! - [`analytics`] — exact reliability by closed form or enumeration,
//!   TO dimensioning and expected resource wastage.
//! - [`engine`] — seeded, replicable Monte-Carlo driver producing
//!   [`engine::SimReport`]s with Wilson confidence intervals.

pub mod analytics;
pub mod engine;
pub mod model;
pub mod phy;
pub mod schemes;
pub mod traffic;

pub use analytics::{ArrivalCase, ReliabilityResult};
pub use engine::{Scenario, SimReport};
pub use model::{CgConfig, CollisionSpec, RvPattern, SchemeKind, SharedParams};
pub use phy::{ChannelParams, DecodeModel};
pub use schemes::{PlannedRep, ResourceKind, TransmissionPlan};
pub use traffic::TrafficModel;
