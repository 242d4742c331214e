//! Crisp production rules over scan snapshots.
//!
//! A rule's condition is a fingerprint: a conjunction of clauses, each
//! requiring a node to be visible and optionally its RSSI to fall inside a
//! closed interval. Every matching rule fires; priority only orders output.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{NodeId, Rssi, ScanSnapshot, Tick};

/// Closed RSSI interval `[low, high]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RssiInterval {
    low: Rssi,
    high: Rssi,
}

impl RssiInterval {
    pub fn new(low: Rssi, high: Rssi) -> Result<Self> {
        if low > high {
            return Err(Error::InvertedInterval {
                low: low.dbm(),
                high: high.dbm(),
            });
        }
        Ok(RssiInterval { low, high })
    }

    /// Convenience constructor from raw dBm values.
    pub fn dbm(low: i32, high: i32) -> Result<Self> {
        Self::new(Rssi::new(low)?, Rssi::new(high)?)
    }

    pub fn low(&self) -> Rssi {
        self.low
    }

    pub fn high(&self) -> Rssi {
        self.high
    }

    pub fn contains(&self, rssi: Rssi) -> bool {
        self.low <= rssi && rssi <= self.high
    }

    /// Membership in `[low - margin, high + margin]`.
    pub fn contains_widened(&self, rssi: Rssi, margin: u16) -> bool {
        let v = rssi.dbm() as i32;
        let m = margin as i32;
        self.low.dbm() as i32 - m <= v && v <= self.high.dbm() as i32 + m
    }
}

/// One conjunct of a fingerprint. Without an interval, visibility alone
/// satisfies the clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub node: NodeId,
    pub interval: Option<RssiInterval>,
}

impl Clause {
    pub fn visible(node: NodeId) -> Self {
        Clause { node, interval: None }
    }

    pub fn between(node: NodeId, interval: RssiInterval) -> Self {
        Clause {
            node,
            interval: Some(interval),
        }
    }

    pub fn matches(&self, snapshot: &ScanSnapshot) -> bool {
        self.matches_widened(snapshot, 0)
    }

    /// Like [`matches`](Self::matches) with the interval widened by
    /// `margin` dBm on both sides. Visibility is still required.
    pub fn matches_widened(&self, snapshot: &ScanSnapshot, margin: u16) -> bool {
        match (snapshot.get(&self.node), &self.interval) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(rssi), Some(iv)) => iv.contains_widened(rssi, margin),
        }
    }
}

/// Non-empty conjunction of clauses over distinct nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    clauses: Vec<Clause>,
}

impl Fingerprint {
    pub fn new(clauses: Vec<Clause>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::EmptyFingerprint);
        }
        let mut seen = HashSet::new();
        for c in &clauses {
            if !seen.insert(&c.node) {
                return Err(Error::DuplicateClauseNode(c.node.to_string()));
            }
        }
        Ok(Fingerprint { clauses })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn matches(&self, snapshot: &ScanSnapshot) -> bool {
        self.clauses.iter().all(|c| c.matches(snapshot))
    }

    pub fn matches_widened(&self, snapshot: &ScanSnapshot, margin: u16) -> bool {
        self.clauses.iter().all(|c| c.matches_widened(snapshot, margin))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ActionSpec {
    /// Make a catalog item available.
    Show(String),
    /// Withdraw a catalog item.
    Hide(String),
    /// Raise a named event for the host application.
    Emit(String),
}

impl ActionSpec {
    pub fn show(content_ref: impl Into<String>) -> Result<Self> {
        Self::checked(ActionSpec::Show(content_ref.into()))
    }

    pub fn hide(content_ref: impl Into<String>) -> Result<Self> {
        Self::checked(ActionSpec::Hide(content_ref.into()))
    }

    pub fn emit(event: impl Into<String>) -> Result<Self> {
        Self::checked(ActionSpec::Emit(event.into()))
    }

    fn checked(action: ActionSpec) -> Result<Self> {
        if action.payload().trim().is_empty() {
            Err(Error::EmptyActionPayload)
        } else {
            Ok(action)
        }
    }

    pub fn payload(&self) -> &str {
        match self {
            ActionSpec::Show(p) | ActionSpec::Hide(p) | ActionSpec::Emit(p) => p,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            ActionSpec::Show(_) => "SHOW",
            ActionSpec::Hide(_) => "HIDE",
            ActionSpec::Emit(_) => "EMIT",
        }
    }

    /// Content reference for SHOW/HIDE, `None` for EMIT.
    pub fn content_ref(&self) -> Option<&str> {
        match self {
            ActionSpec::Show(r) | ActionSpec::Hide(r) => Some(r),
            ActionSpec::Emit(_) => None,
        }
    }
}

impl fmt::Display for ActionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.keyword(), self.payload())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub priority: i64,
    pub fingerprint: Fingerprint,
    pub action: ActionSpec,
}

impl Rule {
    pub fn new(id: impl Into<String>, fingerprint: Fingerprint, action: ActionSpec) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::EmptyRuleId);
        }
        Ok(Rule {
            id,
            priority: 0,
            fingerprint,
            action,
        })
    }

    pub fn with_priority(mut self, priority: i64) -> Self {
        self.priority = priority;
        self
    }

    pub fn evaluate(&self, snapshot: &ScanSnapshot) -> Option<Firing> {
        self.fingerprint.matches(snapshot).then(|| Firing {
            rule_id: self.id.clone(),
            tick: snapshot.tick(),
            action: self.action.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Firing {
    pub rule_id: String,
    pub tick: Tick,
    pub action: ActionSpec,
}

/// Rules with unique ids, held in firing order: priority descending, then
/// id ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        let mut ids = HashSet::new();
        for r in &rules {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::DuplicateRuleId(r.id.clone()));
            }
        }
        let mut rules = rules;
        rules.sort_by(|a, b| b.priority.cmp(&a.priority).then_with(|| a.id.cmp(&b.id)));
        Ok(RuleSet { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn evaluate(&self, snapshot: &ScanSnapshot) -> Vec<Firing> {
        self.rules.iter().filter_map(|r| r.evaluate(snapshot)).collect()
    }
}

pub fn match_clause(clause: &Clause, snapshot: &ScanSnapshot) -> bool {
    clause.matches(snapshot)
}

pub fn evaluate_rule(rule: &Rule, snapshot: &ScanSnapshot) -> Option<Firing> {
    rule.evaluate(snapshot)
}

pub fn evaluate_ruleset(rules: &RuleSet, snapshot: &ScanSnapshot) -> Vec<Firing> {
    rules.evaluate(snapshot)
}
