//! Fuzzy proximity conditions.
//!
//! Linguistic terms such as `near` or `far` are piecewise-linear membership
//! functions over RSSI. Expressions combine term degrees with min (AND),
//! max (OR) and complement (NOT). A rule fires when its expression degree
//! reaches the rule threshold; the degree travels with the firing.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{NodeId, Rssi, ScanSnapshot, Tick};
use crate::rules::{ActionSpec, Firing, Rule};

/// Membership function with breakpoints in dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipFunction {
    Triangle {
        a: f64,
        b: f64,
        c: f64,
    },
    Trapezoid {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    /// 1 at or below `a`, 0 at or above `b`.
    ShoulderLeft {
        a: f64,
        b: f64,
    },
    /// 0 at or below `a`, 1 at or above `b`.
    ShoulderRight {
        a: f64,
        b: f64,
    },
}

impl MembershipFunction {
    pub fn triangle(a: f64, b: f64, c: f64) -> Result<Self> {
        check_breakpoints(&[a, b, c])?;
        Ok(MembershipFunction::Triangle { a, b, c })
    }

    pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        check_breakpoints(&[a, b, c, d])?;
        Ok(MembershipFunction::Trapezoid { a, b, c, d })
    }

    pub fn shoulder_left(a: f64, b: f64) -> Result<Self> {
        check_breakpoints(&[a, b])?;
        Ok(MembershipFunction::ShoulderLeft { a, b })
    }

    pub fn shoulder_right(a: f64, b: f64) -> Result<Self> {
        check_breakpoints(&[a, b])?;
        Ok(MembershipFunction::ShoulderRight { a, b })
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            MembershipFunction::Triangle { a, b, c } => vec![a, b, c],
            MembershipFunction::Trapezoid { a, b, c, d } => vec![a, b, c, d],
            MembershipFunction::ShoulderLeft { a, b } | MembershipFunction::ShoulderRight { a, b } => {
                vec![a, b]
            }
        }
    }

    pub fn shape_name(&self) -> &'static str {
        match self {
            MembershipFunction::Triangle { .. } => "TRIANGLE",
            MembershipFunction::Trapezoid { .. } => "TRAPEZOID",
            MembershipFunction::ShoulderLeft { .. } => "SHOULDER_LEFT",
            MembershipFunction::ShoulderRight { .. } => "SHOULDER_RIGHT",
        }
    }

    /// Degree of membership of `x` dBm, always within [0, 1].
    pub fn degree_at(&self, x: f64) -> f64 {
        match *self {
            MembershipFunction::Triangle { a, b, c } => trapezoid(x, a, b, b, c),
            MembershipFunction::Trapezoid { a, b, c, d } => trapezoid(x, a, b, c, d),
            MembershipFunction::ShoulderRight { a, b } => {
                if x >= b {
                    1.0
                } else if x <= a {
                    0.0
                } else {
                    (x - a) / (b - a)
                }
            }
            MembershipFunction::ShoulderLeft { a, b } => {
                if x <= a {
                    1.0
                } else if x >= b {
                    0.0
                } else {
                    (b - x) / (b - a)
                }
            }
        }
    }

    pub fn degree(&self, rssi: Rssi) -> f64 {
        self.degree_at(rssi.dbm() as f64)
    }
}

impl fmt::Display for MembershipFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let points: Vec<String> = self.breakpoints().iter().map(|p| p.to_string()).collect();
        write!(f, "{}({})", self.shape_name(), points.join(", "))
    }
}

fn check_breakpoints(points: &[f64]) -> Result<()> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidMembership(format!("non-finite breakpoint in {points:?}")));
    }
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidMembership(format!(
            "breakpoints must be non-decreasing: {points:?}"
        )));
    }
    Ok(())
}

fn trapezoid(x: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    if x < a || x > d {
        0.0
    } else if x >= b && x <= c {
        1.0
    } else if x < b {
        (x - a) / (b - a)
    } else {
        (d - x) / (d - c)
    }
}

pub fn membership(mf: &MembershipFunction, rssi: Rssi) -> f64 {
    mf.degree(rssi)
}

/// A named set of terms, e.g. `proximity` with `near` and `far`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    name: String,
    terms: Vec<(String, MembershipFunction)>,
}

impl LinguisticVariable {
    pub fn new(name: impl Into<String>, terms: Vec<(String, MembershipFunction)>) -> Result<Self> {
        let name = name.into();
        if terms.is_empty() {
            return Err(Error::EmptyVariable(name));
        }
        let mut seen = HashSet::new();
        for (t, _) in &terms {
            if !seen.insert(t.as_str()) {
                return Err(Error::DuplicateTerm(t.clone()));
            }
        }
        Ok(LinguisticVariable { name, terms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[(String, MembershipFunction)] {
        &self.terms
    }

    pub fn term(&self, name: &str) -> Option<&MembershipFunction> {
        self.terms.iter().find(|(t, _)| t == name).map(|(_, mf)| mf)
    }
}

/// All linguistic variables in scope. Rules name terms without qualifying
/// them by variable, so term names are unique across the whole set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FuzzyVariables {
    vars: Vec<LinguisticVariable>,
}

impl FuzzyVariables {
    pub fn new(vars: Vec<LinguisticVariable>) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in &vars {
            for (t, _) in v.terms() {
                if !seen.insert(t.as_str()) {
                    return Err(Error::DuplicateTerm(t.clone()));
                }
            }
        }
        Ok(FuzzyVariables { vars })
    }

    pub fn variables(&self) -> &[LinguisticVariable] {
        &self.vars
    }

    pub fn term(&self, name: &str) -> Option<&MembershipFunction> {
        self.vars.iter().find_map(|v| v.term(name))
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FuzzyExpr {
    Term { node: NodeId, term: String },
    And(Box<FuzzyExpr>, Box<FuzzyExpr>),
    Or(Box<FuzzyExpr>, Box<FuzzyExpr>),
    Not(Box<FuzzyExpr>),
}

impl FuzzyExpr {
    pub fn term(node: NodeId, term: impl Into<String>) -> Self {
        FuzzyExpr::Term {
            node,
            term: term.into(),
        }
    }

    pub fn and(l: FuzzyExpr, r: FuzzyExpr) -> Self {
        FuzzyExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: FuzzyExpr, r: FuzzyExpr) -> Self {
        FuzzyExpr::Or(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: FuzzyExpr) -> Self {
        FuzzyExpr::Not(Box::new(e))
    }

    /// Term names referenced anywhere in the tree.
    pub fn term_names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            FuzzyExpr::Term { term, .. } => {
                out.insert(term);
            }
            FuzzyExpr::And(l, r) | FuzzyExpr::Or(l, r) => {
                l.collect_terms(out);
                r.collect_terms(out);
            }
            FuzzyExpr::Not(e) => e.collect_terms(out),
        }
    }

    pub fn has_negation(&self) -> bool {
        match self {
            FuzzyExpr::Term { .. } => false,
            FuzzyExpr::And(l, r) | FuzzyExpr::Or(l, r) => l.has_negation() || r.has_negation(),
            FuzzyExpr::Not(_) => true,
        }
    }

    pub fn evaluate(&self, vars: &FuzzyVariables, snapshot: &ScanSnapshot) -> Result<f64> {
        Ok(match self {
            FuzzyExpr::Term { node, term } => {
                let mf = vars.term(term).ok_or_else(|| Error::UnknownTerm(term.clone()))?;
                snapshot.get(node).map_or(0.0, |rssi| mf.degree(rssi))
            }
            FuzzyExpr::And(l, r) => l.evaluate(vars, snapshot)?.min(r.evaluate(vars, snapshot)?),
            FuzzyExpr::Or(l, r) => l.evaluate(vars, snapshot)?.max(r.evaluate(vars, snapshot)?),
            FuzzyExpr::Not(e) => 1.0 - e.evaluate(vars, snapshot)?,
        })
    }
}

pub fn evaluate_fuzzy_expr(expr: &FuzzyExpr, vars: &FuzzyVariables, snapshot: &ScanSnapshot) -> Result<f64> {
    expr.evaluate(vars, snapshot)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRule {
    pub id: String,
    pub expr: FuzzyExpr,
    threshold: f64,
    pub action: ActionSpec,
}

impl FuzzyRule {
    pub fn new(id: impl Into<String>, expr: FuzzyExpr, threshold: f64, action: ActionSpec) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::EmptyRuleId);
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidThreshold(threshold));
        }
        Ok(FuzzyRule {
            id,
            expr,
            threshold,
            action,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn fire(&self, vars: &FuzzyVariables, snapshot: &ScanSnapshot) -> Result<Option<FuzzyFiring>> {
        self.fire_at(self.threshold, vars, snapshot)
    }

    /// Fires against an explicit threshold instead of the rule's own.
    pub fn fire_at(
        &self,
        threshold: f64,
        vars: &FuzzyVariables,
        snapshot: &ScanSnapshot,
    ) -> Result<Option<FuzzyFiring>> {
        let degree = self.expr.evaluate(vars, snapshot)?;
        Ok((degree >= threshold).then(|| FuzzyFiring {
            rule_id: self.id.clone(),
            tick: snapshot.tick(),
            action: self.action.clone(),
            degree,
        }))
    }
}

pub fn fire_fuzzy_rule(
    rule: &FuzzyRule,
    vars: &FuzzyVariables,
    snapshot: &ScanSnapshot,
) -> Result<Option<FuzzyFiring>> {
    rule.fire(vars, snapshot)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyFiring {
    pub rule_id: String,
    pub tick: Tick,
    pub action: ActionSpec,
    pub degree: f64,
}

impl FuzzyFiring {
    pub fn to_firing(&self) -> Firing {
        Firing {
            rule_id: self.rule_id.clone(),
            tick: self.tick,
            action: self.action.clone(),
        }
    }
}

/// Fuzzy rules checked against one variable set. Rules are kept in id order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FuzzyRuleSet {
    vars: FuzzyVariables,
    rules: Vec<FuzzyRule>,
}

impl FuzzyRuleSet {
    pub fn new(vars: FuzzyVariables, mut rules: Vec<FuzzyRule>) -> Result<Self> {
        let mut ids = HashSet::new();
        for r in &rules {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::DuplicateRuleId(r.id.clone()));
            }
            if let Some(missing) = r.expr.term_names().into_iter().find(|t| vars.term(t).is_none()) {
                return Err(Error::UnknownTerm(missing.to_owned()));
            }
        }
        rules.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(FuzzyRuleSet { vars, rules })
    }

    pub fn variables(&self) -> &FuzzyVariables {
        &self.vars
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn get(&self, id: &str) -> Option<&FuzzyRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn evaluate(&self, snapshot: &ScanSnapshot) -> Vec<FuzzyFiring> {
        self.rules
            .iter()
            .filter_map(|r| {
                r.fire(&self.vars, snapshot)
                    .expect("terms are validated when the set is built")
            })
            .collect()
    }
}

/// Re-expresses a crisp rule as a fuzzy rule with rectangular terms and
/// threshold 1.0. Each bounded clause becomes
/// `AND(SHOULDER_RIGHT(A-1, A), SHOULDER_LEFT(B, B+1))`, which is the
/// indicator of `[A, B]` on integer dBm; a visibility-only clause becomes a
/// term that is 1 across the whole RSSI range.
pub fn embed_crisp(rule: &Rule) -> Result<(FuzzyVariables, FuzzyRule)> {
    const ANY: &str = "visible";
    let min = Rssi::MIN.dbm() as f64;
    let mut terms: Vec<(String, MembershipFunction)> = Vec::new();
    let mut push = |name: String, mf: MembershipFunction| {
        if !terms.iter().any(|(t, _)| *t == name) {
            terms.push((name, mf));
        }
    };
    let mut conjuncts = Vec::new();
    for clause in rule.fingerprint.clauses() {
        match clause.interval {
            None => {
                push(ANY.into(), MembershipFunction::shoulder_right(min - 1.0, min)?);
                conjuncts.push(FuzzyExpr::term(clause.node.clone(), ANY));
            }
            Some(iv) => {
                let (lo, hi) = (iv.low().dbm() as f64, iv.high().dbm() as f64);
                let at_least = format!("at_least_{}", -iv.low().dbm());
                let at_most = format!("at_most_{}", -iv.high().dbm());
                push(at_least.clone(), MembershipFunction::shoulder_right(lo - 1.0, lo)?);
                push(at_most.clone(), MembershipFunction::shoulder_left(hi, hi + 1.0)?);
                conjuncts.push(FuzzyExpr::and(
                    FuzzyExpr::term(clause.node.clone(), at_least),
                    FuzzyExpr::term(clause.node.clone(), at_most),
                ));
            }
        }
    }
    let expr = conjuncts
        .into_iter()
        .reduce(FuzzyExpr::and)
        .expect("fingerprints are non-empty");
    let vars = FuzzyVariables::new(vec![LinguisticVariable::new("rssi", terms)?])?;
    let fuzzy = FuzzyRule::new(rule.id.clone(), expr, 1.0, rule.action.clone())?;
    Ok((vars, fuzzy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{Clause, Fingerprint, RssiInterval};
    use proptest::prelude::*;

    fn node(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    fn rssi(v: i32) -> Rssi {
        Rssi::new(v).unwrap()
    }

    fn proximity() -> FuzzyVariables {
        FuzzyVariables::new(vec![LinguisticVariable::new(
            "proximity",
            vec![
                ("near".into(), MembershipFunction::shoulder_right(-80.0, -50.0).unwrap()),
                ("far".into(), MembershipFunction::shoulder_left(-90.0, -60.0).unwrap()),
            ],
        )
        .unwrap()])
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        let near = MembershipFunction::shoulder_right(-80.0, -50.0).unwrap();
        assert_eq!(membership(&near, rssi(-50)), 1.0);
        assert_eq!(membership(&near, rssi(-90)), 0.0);
        assert_eq!(membership(&near, rssi(-65)), 0.5);
        let tri = MembershipFunction::triangle(-90.0, -70.0, -50.0).unwrap();
        assert_eq!(membership(&tri, rssi(-70)), 1.0);
        assert_eq!(membership(&tri, rssi(-80)), 0.5);
        assert_eq!(membership(&tri, rssi(-95)), 0.0);
        let far = MembershipFunction::shoulder_left(-90.0, -60.0).unwrap();
        assert_eq!(membership(&far, rssi(-100)), 1.0);
        assert_eq!(membership(&far, rssi(-75)), 0.5);
        assert_eq!(membership(&far, rssi(-60)), 0.0);
        let trap = MembershipFunction::trapezoid(-100.0, -90.0, -60.0, -40.0).unwrap();
        assert_eq!(membership(&trap, rssi(-95)), 0.5);
        assert_eq!(membership(&trap, rssi(-70)), 1.0);
        assert_eq!(membership(&trap, rssi(-50)), 0.5);
    }

    #[test]
    fn degenerate_shapes() {
        let step = MembershipFunction::shoulder_right(-60.0, -60.0).unwrap();
        assert_eq!(step.degree(rssi(-60)), 1.0);
        assert_eq!(step.degree(rssi(-61)), 0.0);
        let spike = MembershipFunction::triangle(-60.0, -60.0, -60.0).unwrap();
        assert_eq!(spike.degree(rssi(-60)), 1.0);
        assert_eq!(spike.degree(rssi(-59)), 0.0);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(MembershipFunction::triangle(-50.0, -70.0, -40.0).is_err());
        assert!(MembershipFunction::shoulder_left(f64::NAN, 0.0).is_err());
        assert!(LinguisticVariable::new("v", vec![]).is_err());
    }

    #[test]
    fn expression_examples() {
        let vars = FuzzyVariables::new(vec![LinguisticVariable::new(
            "p",
            vec![("near".into(), MembershipFunction::shoulder_right(-100.0, 0.0).unwrap())],
        )
        .unwrap()])
        .unwrap();
        // near(x) = (x + 100) / 100
        let s = ScanSnapshot::empty(Tick(0))
            .with(node("n1"), rssi(-30))
            .with(node("n2"), rssi(-60))
            .with(node("n3"), rssi(-70))
            .with(node("n4"), rssi(-20));
        let t = |n: &str| FuzzyExpr::term(node(n), "near");
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        assert!(close(
            evaluate_fuzzy_expr(&FuzzyExpr::and(t("n1"), t("n2")), &vars, &s).unwrap(),
            0.4
        ));
        assert_eq!(evaluate_fuzzy_expr(&t("missing"), &vars, &s).unwrap(), 0.0);
        let e = FuzzyExpr::not(FuzzyExpr::or(t("n3"), t("n4")));
        assert!(close(evaluate_fuzzy_expr(&e, &vars, &s).unwrap(), 0.2));
        assert_eq!(
            evaluate_fuzzy_expr(&FuzzyExpr::term(node("n1"), "nope"), &vars, &s),
            Err(Error::UnknownTerm("nope".into()))
        );
    }

    #[test]
    fn threshold_is_inclusive() {
        let vars = FuzzyVariables::new(vec![LinguisticVariable::new(
            "p",
            vec![("near".into(), MembershipFunction::shoulder_right(-100.0, 0.0).unwrap())],
        )
        .unwrap()])
        .unwrap();
        let expr = FuzzyExpr::term(node("n1"), "near");
        let action = ActionSpec::show("c").unwrap();
        let at = |v: i32| ScanSnapshot::empty(Tick(2)).with(node("n1"), rssi(v));

        // 0.6 is not exact in binary, so compare against the computed degree
        let degree = expr.evaluate(&vars, &at(-40)).unwrap();
        let rule = FuzzyRule::new("r", expr.clone(), degree, action.clone()).unwrap();
        let f = fire_fuzzy_rule(&rule, &vars, &at(-40)).unwrap().unwrap();
        assert_eq!(f.degree, degree);
        assert_eq!(f.tick, Tick(2));

        let rule = FuzzyRule::new("r", expr.clone(), 0.6, action.clone()).unwrap();
        assert!(rule.fire(&vars, &at(-41)).unwrap().is_none());

        let rule = FuzzyRule::new("r", expr, 0.0, action).unwrap();
        assert!(rule.fire(&vars, &ScanSnapshot::empty(Tick(0))).unwrap().is_some());
    }

    #[test]
    fn rule_set_validation() {
        let action = ActionSpec::emit("e").unwrap();
        let ok = FuzzyRule::new("a", FuzzyExpr::term(node("n"), "near"), 0.5, action.clone()).unwrap();
        let bad = FuzzyRule::new("b", FuzzyExpr::term(node("n"), "close"), 0.5, action.clone()).unwrap();
        assert_eq!(
            FuzzyRuleSet::new(proximity(), vec![ok.clone(), bad]),
            Err(Error::UnknownTerm("close".into()))
        );
        assert_eq!(
            FuzzyRuleSet::new(proximity(), vec![ok.clone(), ok.clone()]),
            Err(Error::DuplicateRuleId("a".into()))
        );
        assert!(FuzzyRule::new("c", FuzzyExpr::term(node("n"), "near"), 1.5, action).is_err());
        let dup = LinguisticVariable::new(
            "other",
            vec![("near".into(), MembershipFunction::shoulder_right(0.0, 1.0).unwrap())],
        )
        .unwrap();
        let mut vars = proximity().variables().to_vec();
        vars.push(dup);
        assert_eq!(FuzzyVariables::new(vars), Err(Error::DuplicateTerm("near".into())));
    }

    #[test]
    fn embedding_is_exact_over_rssi_range() {
        let fp = Fingerprint::new(vec![
            Clause::between(node("n1"), RssiInterval::dbm(-70, -50).unwrap()),
            Clause::visible(node("n2")),
        ])
        .unwrap();
        let rule = Rule::new("r", fp, ActionSpec::show("c").unwrap()).unwrap();
        let (vars, fuzzy) = embed_crisp(&rule).unwrap();
        for v in Rssi::all() {
            for other in [None, Some(Rssi::MIN), Some(Rssi::MAX)] {
                let mut s = ScanSnapshot::empty(Tick(0)).with(node("n1"), v);
                if let Some(o) = other {
                    s.record(node("n2"), o);
                }
                assert_eq!(
                    rule.evaluate(&s).is_some(),
                    fuzzy.fire(&vars, &s).unwrap().is_some(),
                    "rssi {v} other {other:?}"
                );
            }
        }
    }

    const TERMS: [&str; 4] = ["near", "far", "mid", "edge"];

    fn wide_vars() -> FuzzyVariables {
        FuzzyVariables::new(vec![LinguisticVariable::new(
            "p",
            vec![
                ("near".into(), MembershipFunction::shoulder_right(-80.0, -50.0).unwrap()),
                ("far".into(), MembershipFunction::shoulder_left(-90.0, -60.0).unwrap()),
                ("mid".into(), MembershipFunction::triangle(-90.0, -70.0, -50.0).unwrap()),
                (
                    "edge".into(),
                    MembershipFunction::trapezoid(-110.0, -100.0, -95.0, -85.0).unwrap(),
                ),
            ],
        )
        .unwrap()])
        .unwrap()
    }

    fn arb_expr(terms: &'static [&'static str]) -> impl Strategy<Value = FuzzyExpr> {
        let leaf = (0u8..4, 0..terms.len()).prop_map(move |(n, t)| FuzzyExpr::term(node(&format!("n{n}")), terms[t]));
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| FuzzyExpr::and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| FuzzyExpr::or(l, r)),
                inner.prop_map(FuzzyExpr::not),
            ]
        })
    }

    fn arb_snapshot() -> impl Strategy<Value = ScanSnapshot> {
        prop::collection::vec(prop::option::of(-120i32..=0), 4).prop_map(|rs| {
            let mut s = ScanSnapshot::empty(Tick(0));
            for (i, r) in rs.into_iter().enumerate() {
                if let Some(r) = r {
                    s.record(node(&format!("n{i}")), rssi(r));
                }
            }
            s
        })
    }

    proptest! {
        #[test]
        fn degrees_stay_in_unit_interval(e in arb_expr(&TERMS), s in arb_snapshot()) {
            let d = e.evaluate(&wide_vars(), &s).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
        }

        #[test]
        fn de_morgan_and_idempotence(a in arb_expr(&TERMS), b in arb_expr(&TERMS), s in arb_snapshot()) {
            let vars = wide_vars();
            let lhs = FuzzyExpr::not(FuzzyExpr::and(a.clone(), b.clone())).evaluate(&vars, &s).unwrap();
            let rhs = FuzzyExpr::or(FuzzyExpr::not(a.clone()), FuzzyExpr::not(b.clone())).evaluate(&vars, &s).unwrap();
            prop_assert_eq!(lhs, rhs);
            let da = a.evaluate(&vars, &s).unwrap();
            prop_assert_eq!(FuzzyExpr::and(a.clone(), a.clone()).evaluate(&vars, &s).unwrap(), da);
            prop_assert_eq!(FuzzyExpr::or(a.clone(), a).evaluate(&vars, &s).unwrap(), da);
        }

        #[test]
        fn shoulder_right_expressions_are_monotone(
            e in arb_expr(&["near", "close"]).prop_filter("negation-free", |e| !e.has_negation()),
            s in arb_snapshot(),
            which in 0u8..4,
            bump in 0i32..40,
        ) {
            let vars = FuzzyVariables::new(vec![LinguisticVariable::new(
                "p",
                vec![
                    ("near".into(), MembershipFunction::shoulder_right(-80.0, -50.0).unwrap()),
                    ("close".into(), MembershipFunction::shoulder_right(-70.0, -30.0).unwrap()),
                ],
            ).unwrap()]).unwrap();
            let n = node(&format!("n{which}"));
            let before = e.evaluate(&vars, &s).unwrap();
            if let Some(r) = s.get(&n) {
                let raised = rssi((r.dbm() as i32 + bump).min(0));
                let louder = s.iter().fold(ScanSnapshot::empty(s.tick()), |acc, (k, v)| {
                    acc.with(k.clone(), if *k == n { raised } else { v })
                });
                prop_assert!(e.evaluate(&vars, &louder).unwrap() >= before);
            }
        }
    }
}
