//! Store-and-forward flooding: a device that hears a message for the first
//! time delivers it and rebroadcasts it with one hop less to live.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::simworld::World;

pub const MAX_PAYLOAD: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelayMessage {
    pub origin: String,
    pub seq: u64,
    pub ttl: u32,
    pub payload: String,
}

impl RelayMessage {
    pub fn key(&self) -> (String, u64) {
        (self.origin.clone(), self.seq)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelayDecision {
    DeliverAndRelay(RelayMessage),
    DeliverOnly,
    Drop,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelayNodeState {
    device: String,
    next_seq: u64,
    seen: HashSet<(String, u64)>,
    delivered: Vec<String>,
}

impl RelayNodeState {
    pub fn new(device: impl Into<String>) -> Self {
        RelayNodeState {
            device: device.into(),
            ..Default::default()
        }
    }

    pub fn device(&self) -> &str {
        &self.device
    }

    pub fn delivered(&self) -> &[String] {
        &self.delivered
    }

    pub fn has_seen(&self, origin: &str, seq: u64) -> bool {
        self.seen.contains(&(origin.to_owned(), seq))
    }

    /// Starts a new message from this device.
    pub fn originate(&mut self, payload: impl Into<String>, ttl: u32) -> Result<RelayMessage> {
        if ttl == 0 {
            return Err(Error::ZeroTtl);
        }
        let payload = payload.into();
        let len = payload.chars().count();
        if len > MAX_PAYLOAD {
            return Err(Error::PayloadTooLong(len));
        }
        let msg = RelayMessage {
            origin: self.device.clone(),
            seq: self.next_seq,
            ttl,
            payload,
        };
        self.next_seq += 1;
        self.seen.insert(msg.key());
        Ok(msg)
    }

    pub fn on_receive(&mut self, msg: &RelayMessage) -> RelayDecision {
        if !self.seen.insert(msg.key()) {
            return RelayDecision::Drop;
        }
        self.delivered.push(msg.payload.clone());
        if msg.ttl > 1 {
            RelayDecision::DeliverAndRelay(RelayMessage {
                ttl: msg.ttl - 1,
                ..msg.clone()
            })
        } else {
            RelayDecision::DeliverOnly
        }
    }
}

pub fn originate(node: &mut RelayNodeState, payload: impl Into<String>, ttl: u32) -> Result<RelayMessage> {
    node.originate(payload, ttl)
}

pub fn on_receive(node: &mut RelayNodeState, msg: &RelayMessage) -> RelayDecision {
    node.on_receive(msg)
}

/// Undirected radio links between devices, indexed in id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    ids: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
}

impl VisibilityGraph {
    pub fn new(mut ids: Vec<String>) -> Self {
        ids.sort();
        ids.dedup();
        let adj = vec![BTreeSet::new(); ids.len()];
        VisibilityGraph { ids, adj }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|d| d.as_str().cmp(id)).ok()
    }

    /// Links two devices by index. Self-links are ignored.
    pub fn link(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn link_ids(&mut self, a: &str, b: &str) -> Result<()> {
        let ia = self.index_of(a).ok_or_else(|| Error::UnknownDevice(a.to_owned()))?;
        let ib = self.index_of(b).ok_or_else(|| Error::UnknownDevice(b.to_owned()))?;
        self.link(ia, ib);
        Ok(())
    }

    pub fn neighbors(&self, id: &str) -> Option<Vec<&str>> {
        let i = self.index_of(id)?;
        Some(self.adj[i].iter().map(|&j| self.ids[j].as_str()).collect())
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloodReport {
    /// Round in which each device first delivered; the origin is 0.
    pub hops: BTreeMap<String, Option<u32>>,
    /// Broadcasts made, the origin's included.
    pub transmissions: usize,
    /// Final per-device relay state.
    pub nodes: BTreeMap<String, RelayNodeState>,
}

/// Floods one message from `origin` in synchronous rounds: every broadcast
/// made in round `r` is heard by the sender's neighbors in round `r + 1`.
pub fn flood(graph: &VisibilityGraph, origin: &str, payload: &str, ttl: u32) -> Result<FloodReport> {
    let start = graph
        .index_of(origin)
        .ok_or_else(|| Error::UnknownDevice(origin.to_owned()))?;
    let mut nodes: Vec<RelayNodeState> = graph.ids.iter().map(RelayNodeState::new).collect();
    let mut hops: Vec<Option<u32>> = vec![None; nodes.len()];

    let first = nodes[start].originate(payload, ttl)?;
    hops[start] = Some(0);
    let mut in_flight = vec![(start, first)];
    let mut transmissions = 0;
    let mut round = 0;
    while !in_flight.is_empty() {
        round += 1;
        transmissions += in_flight.len();
        let mut next = Vec::new();
        for (sender, msg) in &in_flight {
            for &nb in &graph.adj[*sender] {
                match nodes[nb].on_receive(msg) {
                    RelayDecision::Drop => continue,
                    RelayDecision::DeliverOnly => {}
                    RelayDecision::DeliverAndRelay(copy) => next.push((nb, copy)),
                }
                hops[nb].get_or_insert(round);
            }
        }
        in_flight = next;
    }

    Ok(FloodReport {
        hops: graph.ids.iter().cloned().zip(hops).collect(),
        transmissions,
        nodes: graph.ids.iter().cloned().zip(nodes).collect(),
    })
}

/// Floods over the world's device visibility graph at its current tick.
pub fn simulate_relay(world: &World, origin: &str, payload: &str, ttl: u32) -> Result<BTreeMap<String, Option<u32>>> {
    if !world.has_device(origin) {
        return Err(Error::UnknownDevice(origin.to_owned()));
    }
    Ok(flood(&world.visibility_graph(), origin, payload, ttl)?.hops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::VecDeque;

    fn line() -> VisibilityGraph {
        let mut g = VisibilityGraph::new(vec!["d1".into(), "d2".into(), "d3".into()]);
        g.link_ids("d1", "d2").unwrap();
        g.link_ids("d2", "d3").unwrap();
        g
    }

    #[test]
    fn originate_examples() {
        let mut d1 = RelayNodeState::new("d1");
        let m = originate(&mut d1, "hi", 3).unwrap();
        assert_eq!((m.seq, m.ttl), (0, 3));
        assert!(d1.has_seen("d1", 0));
        assert_eq!(originate(&mut d1, "again", 3).unwrap().seq, 1);
        assert_eq!(originate(&mut d1, "x", 0), Err(Error::ZeroTtl));
        assert_eq!(originate(&mut d1, "x".repeat(513), 1), Err(Error::PayloadTooLong(513)));
    }

    #[test]
    fn receive_examples() {
        let mut d1 = RelayNodeState::new("d1");
        let mut d2 = RelayNodeState::new("d2");
        let m = d1.originate("hello", 3).unwrap();
        match on_receive(&mut d2, &m) {
            RelayDecision::DeliverAndRelay(copy) => assert_eq!(copy.ttl, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(on_receive(&mut d2, &m), RelayDecision::Drop);
        assert_eq!(d2.delivered(), ["hello"]);

        let last = d1.originate("bye", 1).unwrap();
        assert_eq!(on_receive(&mut d2, &last), RelayDecision::DeliverOnly);
        // the originator never re-delivers its own message
        assert_eq!(on_receive(&mut d1, &m), RelayDecision::Drop);
        assert!(d1.delivered().is_empty());
    }

    #[test]
    fn line_topology() {
        let r = flood(&line(), "d1", "p", 2).unwrap();
        assert_eq!(r.hops["d1"], Some(0));
        assert_eq!(r.hops["d2"], Some(1));
        assert_eq!(r.hops["d3"], Some(2));

        let r = flood(&line(), "d1", "p", 1).unwrap();
        assert_eq!(r.hops["d2"], Some(1));
        assert_eq!(r.hops["d3"], None);

        assert_eq!(flood(&line(), "d9", "p", 1), Err(Error::UnknownDevice("d9".into())));
    }

    fn bfs(n: usize, edges: &[(usize, usize)], src: usize, ttl: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; n];
        dist[src] = Some(0);
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            if du == ttl {
                continue;
            }
            for &(a, b) in edges {
                let v = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    q.push_back(v);
                }
            }
        }
        dist
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..=10).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let len = pairs.len();
            (Just(n), prop::collection::vec(any::<bool>(), len)).prop_map(move |(n, keep)| {
                let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e).collect();
                (n, edges)
            })
        })
    }

    proptest! {
        #[test]
        fn flood_equals_capped_bfs((n, edges) in arb_graph(), src_pick in 0usize..10, ttl in 1u32..12) {
            let ids: Vec<String> = (0..n).map(|i| format!("d{i:02}")).collect();
            let mut g = VisibilityGraph::new(ids.clone());
            for &(a, b) in &edges {
                g.link(a, b);
            }
            let src = src_pick % n;
            let report = flood(&g, &ids[src], "payload", ttl).unwrap();
            let expected = bfs(n, &edges, src, ttl);
            for (i, id) in ids.iter().enumerate() {
                prop_assert_eq!(report.hops[id], expected[i]);
            }
            prop_assert!(report.transmissions <= n);
            for (id, state) in &report.nodes {
                let want = usize::from(report.hops[id].is_some() && *id != ids[src]);
                prop_assert_eq!(state.delivered().len(), want);
            }
        }
    }
}
