//! Observation vocabulary shared by every engine module.
//!
//! Nothing in here carries a position. A device only learns which wireless
//! nodes it can hear and how loudly, one [`ScanSnapshot`] per [`Tick`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Identifier of a wireless node: a MAC-style address, an access point
/// name or a URL broadcast by a beacon.
///
/// Surrounding whitespace is dropped. Equality, ordering and hashing ignore
/// case, but the original spelling is kept for display so that identifiers
/// which embed data (see [`crate::delivery::BeaconIdentity`]) survive.
#[derive(Clone)]
pub struct NodeId {
    raw: String,
    key: String,
}

impl NodeId {
    pub const MAX_LEN: usize = 256;

    pub fn new(value: impl AsRef<str>) -> Result<Self> {
        let raw = value.as_ref().trim();
        if raw.is_empty() {
            return Err(Error::EmptyNodeId);
        }
        let len = raw.chars().count();
        if len > Self::MAX_LEN {
            return Err(Error::NodeIdTooLong(len));
        }
        Ok(NodeId {
            raw: raw.to_owned(),
            key: raw.to_lowercase(),
        })
    }

    /// The identifier as it was written.
    pub fn as_str(&self) -> &str {
        &self.raw
    }

    /// Case-folded form used for comparisons.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl PartialEq for NodeId {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for NodeId {}

impl Hash for NodeId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeId({:?})", self.raw)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

impl std::str::FromStr for NodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NodeId::new(s)
    }
}

/// Received signal strength in whole dBm, within [-120, 0].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rssi(i16);

impl Rssi {
    pub const MIN: Rssi = Rssi(-120);
    pub const MAX: Rssi = Rssi(0);

    pub fn new(dbm: i32) -> Result<Self> {
        if (Self::MIN.0 as i32..=Self::MAX.0 as i32).contains(&dbm) {
            Ok(Rssi(dbm as i16))
        } else {
            Err(Error::RssiOutOfRange(dbm))
        }
    }

    pub fn dbm(self) -> i16 {
        self.0
    }

    /// Every representable value, weakest first.
    pub fn all() -> impl Iterator<Item = Rssi> {
        (Self::MIN.0..=Self::MAX.0).map(Rssi)
    }
}

impl fmt::Display for Rssi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Logical time step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tick(pub u64);

impl Tick {
    pub fn next(self) -> Tick {
        Tick(self.0 + 1)
    }
}

impl fmt::Display for Tick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single reading reported by a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub node: NodeId,
    pub rssi: Rssi,
    pub tick: Tick,
}

impl Observation {
    pub fn new(node: NodeId, rssi: Rssi, tick: Tick) -> Self {
        Observation { node, rssi, tick }
    }
}

/// Deduplicated view of every node a device could hear at one tick.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanSnapshot {
    tick: Tick,
    readings: BTreeMap<NodeId, Rssi>,
}

impl ScanSnapshot {
    pub fn empty(tick: Tick) -> Self {
        ScanSnapshot {
            tick,
            readings: BTreeMap::new(),
        }
    }

    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn get(&self, node: &NodeId) -> Option<Rssi> {
        self.readings.get(node).copied()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.readings.contains_key(node)
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }

    /// Readings in node order.
    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, Rssi)> {
        self.readings.iter().map(|(n, r)| (n, *r))
    }

    /// Records a reading, keeping the stronger value when the node is
    /// already present.
    pub fn record(&mut self, node: NodeId, rssi: Rssi) {
        self.readings
            .entry(node)
            .and_modify(|r| *r = (*r).max(rssi))
            .or_insert(rssi);
    }

    /// Builder-style [`record`](Self::record).
    pub fn with(mut self, node: NodeId, rssi: Rssi) -> Self {
        self.record(node, rssi);
        self
    }

    /// The snapshot's readings as observations at its own tick.
    pub fn observations(&self) -> Vec<Observation> {
        self.iter()
            .map(|(n, r)| Observation::new(n.clone(), r, self.tick))
            .collect()
    }
}

/// Collapses raw observations into a snapshot, one entry per node holding
/// the strongest reading seen for it.
pub fn normalize_snapshot(observations: &[Observation], tick: Tick) -> Result<ScanSnapshot> {
    let mut snapshot = ScanSnapshot::empty(tick);
    for obs in observations {
        if obs.tick != tick {
            return Err(Error::MixedTicks {
                expected: tick,
                found: obs.tick,
            });
        }
        snapshot.record(obs.node.clone(), obs.rssi);
    }
    Ok(snapshot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn node(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    fn obs(n: &str, r: i32, t: u64) -> Observation {
        Observation::new(node(n), Rssi::new(r).unwrap(), Tick(t))
    }

    #[test]
    fn node_id_trims_and_ignores_case() {
        let a = node("  AA:BB:CC:dd:ee:ff ");
        let b = node("aa:bb:cc:DD:EE:FF");
        assert_eq!(a, b);
        assert_eq!(a.as_str(), "AA:BB:CC:dd:ee:ff");
        assert_eq!(a.key(), "aa:bb:cc:dd:ee:ff");
    }

    #[test]
    fn node_id_limits() {
        assert_eq!(NodeId::new("   "), Err(Error::EmptyNodeId));
        assert!(NodeId::new("x".repeat(256)).is_ok());
        assert_eq!(NodeId::new("x".repeat(257)), Err(Error::NodeIdTooLong(257)));
    }

    #[test]
    fn rssi_range() {
        assert!(Rssi::new(-120).is_ok());
        assert!(Rssi::new(0).is_ok());
        assert_eq!(Rssi::new(1), Err(Error::RssiOutOfRange(1)));
        assert_eq!(Rssi::new(-121), Err(Error::RssiOutOfRange(-121)));
        assert_eq!(Rssi::all().count(), 121);
    }

    #[test]
    fn normalize_empty() {
        let s = normalize_snapshot(&[], Tick(0)).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.tick(), Tick(0));
    }

    #[test]
    fn normalize_single() {
        let s = normalize_snapshot(&[obs("n1", -60, 5)], Tick(5)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(&node("n1")), Some(Rssi::new(-60).unwrap()));
        assert_eq!(s.tick(), Tick(5));
    }

    #[test]
    fn normalize_keeps_strongest() {
        let s = normalize_snapshot(&[obs("n1", -70, 5), obs("n1", -55, 5), obs("n2", -80, 5)], Tick(5)).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(&node("n1")).unwrap().dbm(), -55);
        assert_eq!(s.get(&node("n2")).unwrap().dbm(), -80);
    }

    #[test]
    fn normalize_rejects_mixed_ticks() {
        let err = normalize_snapshot(&[obs("n1", -70, 5), obs("n2", -70, 6)], Tick(5));
        assert_eq!(
            err,
            Err(Error::MixedTicks {
                expected: Tick(5),
                found: Tick(6)
            })
        );
    }

    fn arb_observations() -> impl Strategy<Value = Vec<(u8, i32)>> {
        prop::collection::vec((0u8..6, -120i32..=0), 0..24)
    }

    proptest! {
        #[test]
        fn normalize_matches_per_node_max(raw in arb_observations()) {
            let tick = Tick(3);
            let observations: Vec<_> = raw
                .iter()
                .map(|(n, r)| obs(&format!("node-{n}"), *r, 3))
                .collect();
            let snap = normalize_snapshot(&observations, tick).unwrap();

            let mut expected: HashMap<u8, i32> = HashMap::new();
            for (n, r) in &raw {
                let e = expected.entry(*n).or_insert(*r);
                *e = (*e).max(*r);
            }
            prop_assert_eq!(snap.len(), expected.len());
            for (n, r) in expected {
                prop_assert_eq!(snap.get(&node(&format!("node-{n}"))).unwrap().dbm() as i32, r);
            }

            let again = normalize_snapshot(&snap.observations(), tick).unwrap();
            prop_assert_eq!(again, snap);
        }
    }
}
