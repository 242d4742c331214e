//! Proximity fences: Enter/Exit events for a proximity condition, with
//! dwell counts and hysteresis so a noisy boundary does not flap.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyRule, FuzzyVariables};
use crate::model::{ScanSnapshot, Tick};
use crate::rules::Fingerprint;

#[derive(Debug, Clone, PartialEq)]
pub enum FenceCondition {
    Crisp(Fingerprint),
    Fuzzy { rule: FuzzyRule, vars: Arc<FuzzyVariables> },
}

impl FenceCondition {
    /// Evaluates the condition. With `widen` set, crisp intervals grow by
    /// `margin` dBm on both sides and fuzzy thresholds drop by `margin / 100`.
    pub fn holds(&self, snapshot: &ScanSnapshot, widen: bool, margin: u16) -> Result<bool> {
        let margin = if widen { margin } else { 0 };
        match self {
            FenceCondition::Crisp(fp) => Ok(fp.matches_widened(snapshot, margin)),
            FenceCondition::Fuzzy { rule, vars } => {
                let threshold = (rule.threshold() - margin as f64 / 100.0).clamp(0.0, 1.0);
                Ok(rule.fire_at(threshold, vars, snapshot)?.is_some())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FenceSpec {
    pub id: String,
    pub condition: FenceCondition,
    enter_dwell: u32,
    exit_dwell: u32,
    hysteresis: u16,
}

impl FenceSpec {
    pub fn new(
        id: impl Into<String>,
        condition: FenceCondition,
        enter_dwell: u32,
        exit_dwell: u32,
        hysteresis: u16,
    ) -> Result<Self> {
        if enter_dwell == 0 || exit_dwell == 0 {
            return Err(Error::ZeroDwell);
        }
        Ok(FenceSpec {
            id: id.into(),
            condition,
            enter_dwell,
            exit_dwell,
            hysteresis,
        })
    }

    pub fn enter_dwell(&self) -> u32 {
        self.enter_dwell
    }

    pub fn exit_dwell(&self) -> u32 {
        self.exit_dwell
    }

    /// Hysteresis margin in dBm.
    pub fn hysteresis(&self) -> u16 {
        self.hysteresis
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FencePhase {
    #[default]
    Outside,
    /// Consecutive holding snapshots seen so far, below the enter dwell.
    Entering(u32),
    Inside,
    /// Consecutive failing snapshots seen so far, below the exit dwell.
    Exiting(u32),
}

impl FencePhase {
    /// INSIDE and EXITING evaluate the condition with hysteresis applied.
    pub fn is_latched(self) -> bool {
        matches!(self, FencePhase::Inside | FencePhase::Exiting(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FenceState {
    pub phase: FencePhase,
    pub last_tick: Option<Tick>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FenceEventKind {
    Enter,
    Exit,
}

impl fmt::Display for FenceEventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FenceEventKind::Enter => "ENTER",
            FenceEventKind::Exit => "EXIT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FenceEvent {
    pub fence_id: String,
    pub kind: FenceEventKind,
    pub tick: Tick,
}

impl fmt::Display for FenceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E {} {} {}", self.tick, self.fence_id, self.kind)
    }
}

fn transition(
    phase: FencePhase,
    holds: bool,
    enter_dwell: u32,
    exit_dwell: u32,
) -> (FencePhase, Option<FenceEventKind>) {
    use FencePhase::*;
    match (phase, holds) {
        (Outside, false) | (Entering(_), false) => (Outside, None),
        (Outside, true) => count_in(0, enter_dwell),
        (Entering(n), true) => count_in(n, enter_dwell),
        (Inside, true) | (Exiting(_), true) => (Inside, None),
        (Inside, false) => count_out(0, exit_dwell),
        (Exiting(n), false) => count_out(n, exit_dwell),
    }
}

fn count_in(seen: u32, dwell: u32) -> (FencePhase, Option<FenceEventKind>) {
    if seen + 1 >= dwell {
        (FencePhase::Inside, Some(FenceEventKind::Enter))
    } else {
        (FencePhase::Entering(seen + 1), None)
    }
}

fn count_out(seen: u32, dwell: u32) -> (FencePhase, Option<FenceEventKind>) {
    if seen + 1 >= dwell {
        (FencePhase::Outside, Some(FenceEventKind::Exit))
    } else {
        (FencePhase::Exiting(seen + 1), None)
    }
}

/// Advances one fence by one snapshot.
pub fn fence_step(
    spec: &FenceSpec,
    state: FenceState,
    snapshot: &ScanSnapshot,
) -> Result<(FenceState, Option<FenceEvent>)> {
    let tick = snapshot.tick();
    if let Some(last) = state.last_tick {
        if tick <= last {
            return Err(Error::NonMonotonicTick {
                fence: spec.id.clone(),
                last,
                found: tick,
            });
        }
    }
    let holds = spec
        .condition
        .holds(snapshot, state.phase.is_latched(), spec.hysteresis)?;
    let (phase, kind) = transition(state.phase, holds, spec.enter_dwell, spec.exit_dwell);
    let event = kind.map(|kind| FenceEvent {
        fence_id: spec.id.clone(),
        kind,
        tick,
    });
    Ok((
        FenceState {
            phase,
            last_tick: Some(tick),
        },
        event,
    ))
}

/// Runs a set of fences over a stream of snapshots.
#[derive(Debug, Clone)]
pub struct FenceMonitor {
    fences: Vec<(FenceSpec, FenceState)>,
}

impl FenceMonitor {
    pub fn new(specs: Vec<FenceSpec>) -> Result<Self> {
        let mut ids = HashSet::new();
        for s in &specs {
            if !ids.insert(s.id.clone()) {
                return Err(Error::DuplicateFenceId(s.id.clone()));
            }
        }
        let mut fences: Vec<_> = specs.into_iter().map(|s| (s, FenceState::default())).collect();
        fences.sort_by(|a, b| a.0.id.cmp(&b.0.id));
        Ok(FenceMonitor { fences })
    }

    /// Feeds one snapshot to every fence; events come back in fence id order.
    pub fn observe(&mut self, snapshot: &ScanSnapshot) -> Result<Vec<FenceEvent>> {
        let mut events = Vec::new();
        for (spec, state) in &mut self.fences {
            let (next, event) = fence_step(spec, *state, snapshot)?;
            *state = next;
            events.extend(event);
        }
        Ok(events)
    }

    pub fn state(&self, fence_id: &str) -> Option<FenceState> {
        self.fences.iter().find(|(s, _)| s.id == fence_id).map(|(_, st)| *st)
    }
}

/// Folds every fence over the trace from an all-OUTSIDE start.
pub fn run_monitor(specs: &[FenceSpec], trace: &[ScanSnapshot]) -> Result<Vec<FenceEvent>> {
    let mut monitor = FenceMonitor::new(specs.to_vec())?;
    let mut events = Vec::new();
    for snapshot in trace {
        events.extend(monitor.observe(snapshot)?);
    }
    Ok(events)
}
