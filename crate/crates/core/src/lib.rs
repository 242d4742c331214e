//! Proximity inference from wireless scans.
//!
//! The engine sees only which nodes a device can hear and at what RSSI. On
//! top of that it evaluates crisp fingerprint rules ([`rules`]) and fuzzy
//! proximity conditions ([`fuzzy`]), tracks proximity fences ([`fence`]),
//! decides which content is available ([`delivery`]) and floods messages
//! between nearby devices ([`relay`]). [`simworld`] is a radio simulator with
//! hidden geometry used to drive and check all of the above.

pub mod delivery;
pub mod error;
pub mod fence;
pub mod fuzzy;
pub mod model;
pub mod relay;
pub mod rules;
pub mod simworld;

pub use delivery::{BeaconIdentity, Catalog, ContentItem, VisibilitySet};
pub use error::{Error, Result};
pub use fence::{FenceCondition, FenceEvent, FenceEventKind, FenceMonitor, FencePhase, FenceSpec, FenceState};
pub use fuzzy::{
    FuzzyExpr, FuzzyFiring, FuzzyRule, FuzzyRuleSet, FuzzyVariables, LinguisticVariable, MembershipFunction,
};
pub use model::{NodeId, Observation, Rssi, ScanSnapshot, Tick};
pub use relay::{RelayDecision, RelayMessage, RelayNodeState, VisibilityGraph};
pub use rules::{ActionSpec, Clause, Fingerprint, Firing, RssiInterval, Rule, RuleSet};
pub use simworld::{RadioParams, World};
