//! Synthetic radio environment.
//!
//! Beacons and devices live at 2-D positions in meters that never leave this
//! module: the only things a caller can get back are scan snapshots, the
//! device-to-device visibility graph and yes/no answers from
//! [`World::ground_truth_near`], which tests use as the oracle for what
//! "near" should mean.
//!
//! Signal strength follows the log-distance model
//! `p0 - 10 n log10(d) + noise`, with `noise ~ N(0, sigma)` drawn from a
//! generator keyed by (seed, tick, receiver, transmitter) so that any scan can
//! be reproduced on its own.

use std::collections::{BTreeMap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{NodeId, Rssi, ScanSnapshot, Tick};
use crate::relay::VisibilityGraph;

/// Scans treat anything closer than this as this far away.
pub const MIN_DISTANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// RSSI at the 1 m reference distance, dBm.
    pub p0: f64,
    /// Path-loss exponent.
    pub n: f64,
    /// Shadowing standard deviation, dB.
    pub sigma: f64,
    /// Weakest detectable signal, dBm.
    pub sensitivity: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            p0: -40.0,
            n: 2.5,
            sigma: 2.0,
            sensitivity: -95.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidRadioParams(msg));
        if !self.p0.is_finite() {
            return bad(format!("p0 must be finite, got {}", self.p0));
        }
        if !(self.n.is_finite() && self.n > 0.0) {
            return bad(format!("path-loss exponent must be positive, got {}", self.n));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return bad(format!("sigma must be non-negative, got {}", self.sigma));
        }
        let range = Rssi::MIN.dbm() as f64..=Rssi::MAX.dbm() as f64;
        if !range.contains(&self.sensitivity) {
            return bad(format!("sensitivity {} outside the rssi range", self.sensitivity));
        }
        Ok(())
    }

    /// Distance at which a noiseless signal drops to the sensitivity floor:
    /// `10^((p0 - sensitivity) / (10 n))`.
    pub fn detection_radius(&self) -> f64 {
        10f64.powf((self.p0 - self.sensitivity) / (10.0 * self.n))
    }

    /// Unrounded received power before the sensitivity cut.
    pub fn received_power(&self, distance: f64, noise: f64) -> Result<f64> {
        if distance.is_nan() || distance <= 0.0 {
            return Err(Error::NonPositiveDistance(distance));
        }
        Ok(self.p0 - 10.0 * self.n * distance.log10() + noise)
    }
}

/// Reading a receiver gets at `distance` meters, or `None` below the
/// sensitivity floor. Detection is decided on the unrounded power; the
/// reported value is rounded to whole dBm and clamped to the RSSI range.
pub fn rssi_at(params: &RadioParams, distance: f64, noise: f64) -> Result<Option<Rssi>> {
    let raw = params.received_power(distance, noise)?;
    if raw < params.sensitivity {
        return Ok(None);
    }
    let dbm = raw.round().clamp(Rssi::MIN.dbm() as f64, Rssi::MAX.dbm() as f64) as i32;
    Ok(Some(Rssi::new(dbm)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    x: f64,
    y: f64,
}

impl Point {
    fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Waypoint {
    to: Point,
    /// Meters per tick along the segment ending here.
    speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Mover {
    at: Point,
    path: VecDeque<Waypoint>,
}

impl Mover {
    fn new(x: f64, y: f64, path: &[(f64, f64, f64)]) -> Result<Self> {
        let finite = |v: f64| v.is_finite();
        if !(finite(x) && finite(y)) {
            return Err(Error::InvalidWorld(format!("non-finite position ({x}, {y})")));
        }
        let mut waypoints = VecDeque::new();
        for &(wx, wy, speed) in path {
            if !(finite(wx) && finite(wy)) {
                return Err(Error::InvalidWorld(format!("non-finite waypoint ({wx}, {wy})")));
            }
            if !(speed.is_finite() && speed > 0.0) {
                return Err(Error::InvalidWorld(format!(
                    "waypoint speed must be positive, got {speed}"
                )));
            }
            waypoints.push_back(Waypoint {
                to: Point { x: wx, y: wy },
                speed,
            });
        }
        Ok(Mover {
            at: Point { x, y },
            path: waypoints,
        })
    }

    /// Moves for one tick. Time left over after reaching a waypoint is spent
    /// on the next segment at that segment's speed.
    fn advance(&mut self) {
        let mut time = 1.0;
        while time > 0.0 {
            let Some(wp) = self.path.front().copied() else {
                break;
            };
            let remaining = self.at.distance(wp.to);
            let reach = wp.speed * time;
            if remaining <= reach {
                self.at = wp.to;
                time -= remaining / wp.speed;
                self.path.pop_front();
            } else {
                let f = reach / remaining;
                self.at = Point {
                    x: self.at.x + (wp.to.x - self.at.x) * f,
                    y: self.at.y + (wp.to.y - self.at.y) * f,
                };
                time = 0.0;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Device {
    mover: Mover,
    advertises: Option<NodeId>,
}

/// Ground-truth world. Positions are private; see the module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    beacons: BTreeMap<NodeId, Mover>,
    devices: BTreeMap<String, Device>,
    params: RadioParams,
    seed: u64,
    tick: Tick,
}

impl World {
    pub fn new(params: RadioParams, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(World {
            beacons: BTreeMap::new(),
            devices: BTreeMap::new(),
            params,
            seed,
            tick: Tick(0),
        })
    }

    /// Places a beacon. `path` lists `(x, y, speed)` waypoints; empty for a
    /// stationary beacon.
    pub fn add_beacon(&mut self, node: NodeId, x: f64, y: f64, path: &[(f64, f64, f64)]) -> Result<()> {
        if self.beacons.contains_key(&node) {
            return Err(Error::InvalidWorld(format!("duplicate beacon `{node}`")));
        }
        self.beacons.insert(node, Mover::new(x, y, path)?);
        Ok(())
    }

    /// Places a device. A device that `advertises` a node id is heard by the
    /// other devices' scans under that id.
    pub fn add_device(
        &mut self,
        id: impl Into<String>,
        x: f64,
        y: f64,
        path: &[(f64, f64, f64)],
        advertises: Option<NodeId>,
    ) -> Result<()> {
        let id = id.into();
        if id.trim().is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidWorld(format!("invalid device id `{id}`")));
        }
        if self.devices.contains_key(&id) {
            return Err(Error::InvalidWorld(format!("duplicate device `{id}`")));
        }
        self.devices.insert(
            id,
            Device {
                mover: Mover::new(x, y, path)?,
                advertises,
            },
        );
        Ok(())
    }

    pub fn params(&self) -> &RadioParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn device_ids(&self) -> impl Iterator<Item = &str> {
        self.devices.keys().map(String::as_str)
    }

    pub fn beacon_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.beacons.keys()
    }

    pub fn has_device(&self, id: &str) -> bool {
        self.devices.contains_key(id)
    }

    fn device(&self, id: &str) -> Result<&Device> {
        self.devices.get(id).ok_or_else(|| Error::UnknownDevice(id.to_owned()))
    }

    /// Transmitters audible to `device`: every beacon plus every other device
    /// that advertises an id.
    fn transmitters<'a>(&'a self, device: &'a str) -> impl Iterator<Item = (&'a NodeId, Point)> + 'a {
        let beacons = self.beacons.iter().map(|(n, m)| (n, m.at));
        let peers = self
            .devices
            .iter()
            .filter(move |(id, _)| id.as_str() != device)
            .filter_map(|(_, d)| d.advertises.as_ref().map(|n| (n, d.mover.at)));
        beacons.chain(peers)
    }

    fn noise(&self, device: &str, node: &NodeId) -> f64 {
        if self.params.sigma == 0.0 {
            return 0.0;
        }
        let key = noise_key(self.seed, self.tick, device, node);
        let normal = Normal::new(0.0, self.params.sigma).expect("sigma validated");
        normal.sample(&mut ChaCha8Rng::seed_from_u64(key))
    }

    /// What `device` hears at the current tick.
    pub fn scan(&self, device: &str) -> Result<ScanSnapshot> {
        let at = self.device(device)?.mover.at;
        let mut snapshot = ScanSnapshot::empty(self.tick);
        for (node, pos) in self.transmitters(device) {
            let d = at.distance(pos).max(MIN_DISTANCE);
            if let Some(rssi) = rssi_at(&self.params, d, self.noise(device, node))? {
                snapshot.record(node.clone(), rssi);
            }
        }
        Ok(snapshot)
    }

    /// Advances every moving entity by one tick.
    pub fn step(&mut self) {
        self.tick = self.tick.next();
        for m in self.beacons.values_mut() {
            m.advance();
        }
        for d in self.devices.values_mut() {
            d.mover.advance();
        }
    }

    /// Scans every device, then steps, `ticks` times. Traces are keyed by
    /// device id.
    pub fn record_traces(&mut self, ticks: u64) -> Result<BTreeMap<String, Vec<ScanSnapshot>>> {
        let ids: Vec<String> = self.devices.keys().cloned().collect();
        let mut traces: BTreeMap<String, Vec<ScanSnapshot>> = ids.iter().map(|id| (id.clone(), Vec::new())).collect();
        for _ in 0..ticks {
            for id in &ids {
                let snap = self.scan(id)?;
                traces.get_mut(id).expect("seeded above").push(snap);
            }
            self.step();
        }
        Ok(traces)
    }

    /// Ground truth: is `node` within `radius` meters of `device`?
    pub fn ground_truth_near(&self, device: &str, node: &NodeId, radius: f64) -> Result<bool> {
        let at = self.device(device)?.mover.at;
        let pos = self
            .beacons
            .get(node)
            .map(|m| m.at)
            .or_else(|| {
                self.devices
                    .values()
                    .find(|d| d.advertises.as_ref() == Some(node))
                    .map(|d| d.mover.at)
            })
            .ok_or_else(|| Error::UnknownNode(node.to_string()))?;
        Ok(at.distance(pos) <= radius)
    }

    /// Device-to-device links at the current tick. Two devices are linked
    /// when the noiseless signal between them clears the sensitivity floor;
    /// distance is symmetric so the link is mutual.
    pub fn visibility_graph(&self) -> VisibilityGraph {
        let ids: Vec<String> = self.devices.keys().cloned().collect();
        let positions: Vec<Point> = self.devices.values().map(|d| d.mover.at).collect();
        let mut graph = VisibilityGraph::new(ids);
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let d = positions[i].distance(positions[j]).max(MIN_DISTANCE);
                let heard = rssi_at(&self.params, d, 0.0).expect("distance is positive").is_some();
                if heard {
                    graph.link(i, j);
                }
            }
        }
        graph
    }
}

fn fnv1a(bytes: &[u8], mut h: u64) -> u64 {
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn noise_key(seed: u64, tick: Tick, device: &str, node: &NodeId) -> u64 {
    let mut h = fnv1a(device.as_bytes(), 0xcbf2_9ce4_8422_2325);
    h = fnv1a(&[0xff], h);
    h = fnv1a(node.key().as_bytes(), h);
    splitmix64(splitmix64(seed ^ h).wrapping_add(tick.0))
}
