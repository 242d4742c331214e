//! Rule language: crisp `RULE` blocks, `FUZZIFY` term definitions,
//! `FUZZYRULE` blocks and single-line `FENCE` declarations.
//!
//! ```text
//! FUZZIFY proximity
//!   TERM near := SHOULDER_RIGHT(-80, -50)
//! END
//! RULE cafe PRIORITY 2
//! WHEN NODE "aa:bb:cc:dd:ee:ff" VISIBLE RSSI BETWEEN -70 AND -50
//! AND NODE "cafe-wifi" VISIBLE
//! THEN SHOW "coupon"
//! FUZZYRULE lobby THRESHOLD 0.6
//! WHEN NODE "lobby-tag" IS near
//! THEN EMIT "welcome"
//! FENCE door ON RULE cafe ENTER_DWELL 2 EXIT_DWELL 3 HYSTERESIS 4
//! ```
//!
//! Loading is all-or-nothing: the parser keeps going after an error to report
//! as many problems as it can, but returns no program if any were found.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use proxfence::fuzzy::{FuzzyExpr, FuzzyRule, FuzzyRuleSet, FuzzyVariables, LinguisticVariable, MembershipFunction};
use proxfence::{
    ActionSpec, Catalog, Clause, FenceCondition, FenceSpec, Fingerprint, NodeId, Rssi, RssiInterval, Rule, RuleSet,
};

use crate::error::ParseError;
use crate::lexer::{quote, tokenize, Token, TokenKind};

const TOP_LEVEL: [&str; 4] = ["RULE", "FUZZYRULE", "FUZZIFY", "FENCE"];

/// A fence together with the rule its condition came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FenceDecl {
    pub spec: FenceSpec,
    pub rule_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Site {
    line: usize,
    col: usize,
}

impl From<&Token> for Site {
    fn from(t: &Token) -> Self {
        Site {
            line: t.line,
            col: t.col,
        }
    }
}

/// Everything declared in a rules file.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub rules: RuleSet,
    pub fuzzy: FuzzyRuleSet,
    pub fences: Vec<FenceDecl>,
    action_sites: BTreeMap<String, Site>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.fuzzy == other.fuzzy && self.fences == other.fences
    }
}

impl Program {
    pub fn fence_specs(&self) -> Vec<FenceSpec> {
        self.fences.iter().map(|f| f.spec.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.fuzzy.is_empty() && self.fences.is_empty()
    }

    /// Every SHOW/HIDE must name a catalog item. Errors point at the action
    /// in the rules file.
    pub fn check_catalog(&self, catalog: &Catalog, file: &str) -> Result<(), Vec<ParseError>> {
        let actions = self
            .rules
            .rules()
            .iter()
            .map(|r| (&r.id, &r.action))
            .chain(self.fuzzy.rules().iter().map(|r| (&r.id, &r.action)));
        let mut errors = Vec::new();
        for (id, action) in actions {
            if let Some(content) = action.content_ref() {
                if !catalog.contains(content) {
                    let site = self.action_sites.get(id).copied().unwrap_or(Site { line: 1, col: 1 });
                    errors.push(ParseError::new(
                        file,
                        site.line,
                        site.col,
                        format!("rule `{id}` refers to content `{content}` which is not in the catalog"),
                    ));
                }
            }
        }
        errors.sort_by_key(|e| (e.line, e.column));
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

struct Line {
    tokens: Vec<Token>,
}

impl Line {
    fn head(&self) -> &Token {
        &self.tokens[0]
    }

    fn is_top_level(&self) -> bool {
        TOP_LEVEL.iter().any(|k| self.head().is_word(k))
    }
}

type PResult<T> = Result<T, (Site, String)>;

fn err<T>(at: impl Into<Site>, msg: impl Into<String>) -> PResult<T> {
    Err((at.into(), msg.into()))
}

/// Cursor over the tokens of one construct. `end` is the token blamed when
/// input runs out.
struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    end: &'a Token,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token], end: &'a Token) -> Self {
        Cursor { toks, pos: 0, end }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self, what: &str) -> PResult<&'a Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => err(self.end, format!("expected {what} after `{}`", self.end.text)),
        }
    }

    fn word(&mut self, kw: &str) -> PResult<&'a Token> {
        let t = self.next(&format!("`{kw}`"))?;
        if t.is_word(kw) {
            Ok(t)
        } else {
            err(t, format!("expected `{kw}`, found {}", t.describe()))
        }
    }

    fn sym(&mut self, s: &str) -> PResult<&'a Token> {
        let t = self.next(&format!("`{s}`"))?;
        if t.is_sym(s) {
            Ok(t)
        } else {
            err(t, format!("expected `{s}`, found {}", t.describe()))
        }
    }

    fn string(&mut self, what: &str) -> PResult<&'a Token> {
        let t = self.next(what)?;
        if t.kind == TokenKind::Str {
            Ok(t)
        } else {
            err(t, format!("expected quoted {what}, found {}", t.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<&'a Token> {
        let t = self.next(what)?;
        if t.kind == TokenKind::Word {
            Ok(t)
        } else {
            err(t, format!("expected {what}, found {}", t.describe()))
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> PResult<(T, &'a Token)> {
        let t = self.next(what)?;
        match (t.kind, t.text.parse::<T>()) {
            (TokenKind::Word, Ok(v)) => Ok((v, t)),
            _ => err(t, format!("expected {what}, found {}", t.describe())),
        }
    }

    fn done(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => err(t, format!("unexpected {}", t.describe())),
        }
    }
}

fn node_id(t: &Token) -> PResult<NodeId> {
    NodeId::new(&t.text).or_else(|e| err(t, e.to_string()))
}

fn rssi(v: i32, t: &Token) -> PResult<Rssi> {
    Rssi::new(v).or_else(|e| err(t, e.to_string()))
}

fn action(line: &Line) -> PResult<(ActionSpec, Site)> {
    let mut c = Cursor::new(&line.tokens, line.tokens.last().expect("non-empty"));
    c.word("THEN")?;
    let kind = c.ident("SHOW, HIDE or EMIT")?;
    let payload = c.string("payload")?;
    c.done()?;
    let built = match kind.text.as_str() {
        "SHOW" => ActionSpec::show(&payload.text),
        "HIDE" => ActionSpec::hide(&payload.text),
        "EMIT" => ActionSpec::emit(&payload.text),
        _ => return err(kind, format!("expected SHOW, HIDE or EMIT, found {}", kind.describe())),
    };
    built
        .map(|a| (a, Site::from(payload)))
        .or_else(|e| err(payload, e.to_string()))
}

struct CrispDecl {
    rule: Rule,
    id_site: Site,
    action_site: Site,
}

struct FuzzyDecl {
    id: String,
    id_site: Site,
    threshold: f64,
    expr: FuzzyExpr,
    term_sites: Vec<(String, Site)>,
    action: ActionSpec,
    action_site: Site,
}

struct VarDecl {
    name: String,
    terms: Vec<(String, MembershipFunction, Site)>,
}

struct FenceLine {
    id: String,
    id_site: Site,
    rule_id: String,
    rule_site: Site,
    enter: u32,
    exit: u32,
    hysteresis: u16,
}

#[derive(Default)]
struct Decls {
    crisp: Vec<CrispDecl>,
    fuzzy: Vec<FuzzyDecl>,
    vars: Vec<VarDecl>,
    fences: Vec<FenceLine>,
}

struct Parser<'a> {
    lines: &'a [Line],
    i: usize,
}

impl<'a> Parser<'a> {
    /// Gathers the WHEN condition and THEN action of a block whose header
    /// is at `self.i`. Continuation lines must start with one of `joiners`.
    fn condition_and_action(&mut self, joiners: &[&str]) -> PResult<(Vec<Token>, &'a Line)> {
        let header = &self.lines[self.i];
        self.i += 1;
        let Some(when) = self.lines.get(self.i).filter(|l| l.head().is_word("WHEN")) else {
            let at = self
                .lines
                .get(self.i)
                .filter(|l| !l.is_top_level())
                .map_or(header.head(), |l| l.head());
            return err(at, "expected a WHEN line");
        };
        let mut cond: Vec<Token> = when.tokens[1..].to_vec();
        if cond.is_empty() {
            return err(when.head(), "empty condition");
        }
        self.i += 1;
        loop {
            let Some(line) = self.lines.get(self.i) else {
                return err(header.head(), "block ends without a THEN line");
            };
            if line.head().is_word("THEN") {
                self.i += 1;
                return Ok((cond, line));
            }
            if joiners.iter().any(|j| line.head().is_word(j)) {
                cond.extend(line.tokens.iter().cloned());
                self.i += 1;
                continue;
            }
            if line.is_top_level() {
                return err(header.head(), "block ends without a THEN line");
            }
            return err(
                line.head(),
                format!("expected THEN or a continuation line, found {}", line.head().describe()),
            );
        }
    }

    fn crisp_rule(&mut self) -> PResult<CrispDecl> {
        let header = &self.lines[self.i];
        let mut c = Cursor::new(&header.tokens, header.tokens.last().expect("non-empty"));
        c.word("RULE")?;
        let id = c.ident("rule id")?;
        let mut priority = 0i64;
        if c.peek().is_some_and(|t| t.is_word("PRIORITY")) {
            c.word("PRIORITY")?;
            priority = c.number::<i64>("integer priority")?.0;
        }
        c.done()?;

        let (cond, then) = self.condition_and_action(&["AND"])?;
        let mut c = Cursor::new(&cond, cond.last().expect("non-empty"));
        let mut clauses = Vec::new();
        let mut seen: HashSet<NodeId> = HashSet::new();
        loop {
            c.word("NODE")?;
            let node_tok = c.string("node id")?;
            let node = node_id(node_tok)?;
            if !seen.insert(node.clone()) {
                return err(node_tok, format!("node `{node}` appears twice in one fingerprint"));
            }
            c.word("VISIBLE")?;
            let mut interval = None;
            if c.peek().is_some_and(|t| t.is_word("RSSI")) {
                c.word("RSSI")?;
                c.word("BETWEEN")?;
                let (lo, lo_tok) = c.number::<i32>("integer dBm")?;
                c.word("AND")?;
                let (hi, hi_tok) = c.number::<i32>("integer dBm")?;
                let (lo, hi) = (rssi(lo, lo_tok)?, rssi(hi, hi_tok)?);
                interval = Some(RssiInterval::new(lo, hi).or_else(|e| err(lo_tok, e.to_string()))?);
            }
            clauses.push(Clause { node, interval });
            match c.peek() {
                None => break,
                Some(t) if t.is_word("AND") => {
                    c.word("AND")?;
                }
                Some(t) => return err(t, format!("expected AND or end of condition, found {}", t.describe())),
            }
        }
        let fingerprint = Fingerprint::new(clauses).or_else(|e| err(id, e.to_string()))?;
        let (action, action_site) = action(then)?;
        let rule = Rule::new(id.text.clone(), fingerprint, action)
            .or_else(|e| err(id, e.to_string()))?
            .with_priority(priority);
        Ok(CrispDecl {
            rule,
            id_site: id.into(),
            action_site,
        })
    }

    fn fuzzy_rule(&mut self) -> PResult<FuzzyDecl> {
        let header = &self.lines[self.i];
        let mut c = Cursor::new(&header.tokens, header.tokens.last().expect("non-empty"));
        c.word("FUZZYRULE")?;
        let id = c.ident("rule id")?;
        c.word("THRESHOLD")?;
        let (threshold, t_tok) = c.number::<f64>("threshold")?;
        if !(0.0..=1.0).contains(&threshold) {
            return err(t_tok, format!("threshold {threshold} outside [0, 1]"));
        }
        c.done()?;

        let (cond, then) = self.condition_and_action(&["AND", "OR"])?;
        let mut c = Cursor::new(&cond, cond.last().expect("non-empty"));
        let mut term_sites = Vec::new();
        let expr = fuzzy_or(&mut c, &mut term_sites)?;
        c.done()?;
        let (action, action_site) = action(then)?;
        Ok(FuzzyDecl {
            id: id.text.clone(),
            id_site: id.into(),
            threshold,
            expr,
            term_sites,
            action,
            action_site,
        })
    }

    fn fuzzify(&mut self) -> PResult<VarDecl> {
        let header = &self.lines[self.i];
        let mut c = Cursor::new(&header.tokens, header.tokens.last().expect("non-empty"));
        c.word("FUZZIFY")?;
        let name = c.ident("variable name")?;
        c.done()?;
        self.i += 1;
        let mut terms = Vec::new();
        loop {
            let Some(line) = self.lines.get(self.i) else {
                return err(header.head(), "FUZZIFY block has no END");
            };
            if line.head().is_word("END") {
                Cursor::new(&line.tokens[1..], line.head()).done()?;
                self.i += 1;
                break;
            }
            if line.is_top_level() {
                return err(header.head(), "FUZZIFY block has no END");
            }
            let mut c = Cursor::new(&line.tokens, line.tokens.last().expect("non-empty"));
            c.word("TERM")?;
            let term = c.ident("term name")?;
            c.sym(":=")?;
            let shape = c.ident("membership shape")?;
            c.sym("(")?;
            let mut points = vec![c.number::<f64>("breakpoint")?.0];
            while c.peek().is_some_and(|t| t.is_sym(",")) {
                c.sym(",")?;
                points.push(c.number::<f64>("breakpoint")?.0);
            }
            c.sym(")")?;
            c.done()?;
            let arity = match shape.text.as_str() {
                "TRIANGLE" => 3,
                "TRAPEZOID" => 4,
                "SHOULDER_LEFT" | "SHOULDER_RIGHT" => 2,
                _ => {
                    return err(
                        shape,
                        format!(
                            "unknown shape {}, expected TRIANGLE, TRAPEZOID, SHOULDER_LEFT or SHOULDER_RIGHT",
                            shape.describe()
                        ),
                    )
                }
            };
            if points.len() != arity {
                return err(
                    shape,
                    format!("{} takes {arity} breakpoints, got {}", shape.text, points.len()),
                );
            }
            let mf = match shape.text.as_str() {
                "TRIANGLE" => MembershipFunction::triangle(points[0], points[1], points[2]),
                "TRAPEZOID" => MembershipFunction::trapezoid(points[0], points[1], points[2], points[3]),
                "SHOULDER_LEFT" => MembershipFunction::shoulder_left(points[0], points[1]),
                _ => MembershipFunction::shoulder_right(points[0], points[1]),
            }
            .or_else(|e| err(shape, e.to_string()))?;
            terms.push((term.text.clone(), mf, Site::from(term)));
            self.i += 1;
        }
        if terms.is_empty() {
            return err(name, format!("variable `{}` defines no terms", name.text));
        }
        Ok(VarDecl {
            name: name.text.clone(),
            terms,
        })
    }

    fn fence(&mut self) -> PResult<FenceLine> {
        let line = &self.lines[self.i];
        self.i += 1;
        let mut c = Cursor::new(&line.tokens, line.tokens.last().expect("non-empty"));
        c.word("FENCE")?;
        let id = c.ident("fence id")?;
        c.word("ON")?;
        c.word("RULE")?;
        let rule = c.ident("rule id")?;
        c.word("ENTER_DWELL")?;
        let (enter, enter_tok) = c.number::<u32>("dwell count")?;
        c.word("EXIT_DWELL")?;
        let (exit, exit_tok) = c.number::<u32>("dwell count")?;
        c.word("HYSTERESIS")?;
        let (hysteresis, _) = c.number::<u16>("non-negative dBm margin")?;
        c.done()?;
        if enter == 0 {
            return err(enter_tok, "dwell count must be at least 1");
        }
        if exit == 0 {
            return err(exit_tok, "dwell count must be at least 1");
        }
        Ok(FenceLine {
            id: id.text.clone(),
            id_site: id.into(),
            rule_id: rule.text.clone(),
            rule_site: rule.into(),
            enter,
            exit,
            hysteresis,
        })
    }
}

fn fuzzy_or(c: &mut Cursor<'_>, sites: &mut Vec<(String, Site)>) -> PResult<FuzzyExpr> {
    let mut lhs = fuzzy_and(c, sites)?;
    while c.peek().is_some_and(|t| t.is_word("OR")) {
        c.word("OR")?;
        lhs = FuzzyExpr::or(lhs, fuzzy_and(c, sites)?);
    }
    Ok(lhs)
}

fn fuzzy_and(c: &mut Cursor<'_>, sites: &mut Vec<(String, Site)>) -> PResult<FuzzyExpr> {
    let mut lhs = fuzzy_unary(c, sites)?;
    while c.peek().is_some_and(|t| t.is_word("AND")) {
        c.word("AND")?;
        lhs = FuzzyExpr::and(lhs, fuzzy_unary(c, sites)?);
    }
    Ok(lhs)
}

fn fuzzy_unary(c: &mut Cursor<'_>, sites: &mut Vec<(String, Site)>) -> PResult<FuzzyExpr> {
    let t = c.next("a condition")?;
    if t.is_word("NOT") {
        return Ok(FuzzyExpr::not(fuzzy_unary(c, sites)?));
    }
    if t.is_sym("(") {
        let inner = fuzzy_or(c, sites)?;
        c.sym(")")?;
        return Ok(inner);
    }
    if !t.is_word("NODE") {
        return err(t, format!("expected NODE, NOT or `(`, found {}", t.describe()));
    }
    let node = node_id(c.string("node id")?)?;
    c.word("IS")?;
    let term = c.ident("term name")?;
    sites.push((term.text.clone(), term.into()));
    Ok(FuzzyExpr::term(node, term.text.clone()))
}

/// Parses a rules file. `file` is only used to label errors.
pub fn parse_ruleset(text: &str, file: &str) -> Result<Program, Vec<ParseError>> {
    let mut errors: Vec<ParseError> = Vec::new();
    let push = |errors: &mut Vec<ParseError>, site: Site, msg: String| {
        errors.push(ParseError::new(file, site.line, site.col, msg));
    };

    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match tokenize(raw, idx + 1) {
            Ok(tokens) => lines.push(Line { tokens }),
            Err((col, msg)) => push(&mut errors, Site { line: idx + 1, col }, msg),
        }
    }

    let mut decls = Decls::default();
    let mut p = Parser { lines: &lines, i: 0 };
    while p.i < lines.len() {
        let start = p.i;
        let head = lines[start].head();
        let outcome = if head.is_word("RULE") {
            p.crisp_rule().map(|d| decls.crisp.push(d))
        } else if head.is_word("FUZZYRULE") {
            p.fuzzy_rule().map(|d| decls.fuzzy.push(d))
        } else if head.is_word("FUZZIFY") {
            p.fuzzify().map(|d| decls.vars.push(d))
        } else if head.is_word("FENCE") {
            p.fence().map(|d| decls.fences.push(d))
        } else {
            err(
                head,
                format!("expected RULE, FUZZYRULE, FUZZIFY or FENCE, found {}", head.describe()),
            )
        };
        if let Err((site, msg)) = outcome {
            push(&mut errors, site, msg);
            // resume at the next declaration
            p.i = (start + 1).max(p.i);
            while p.i < lines.len() && !lines[p.i].is_top_level() {
                p.i += 1;
            }
        }
    }

    let program = assemble(decls, &mut |site, msg| push(&mut errors, site, msg));
    if errors.is_empty() {
        Ok(program.expect("no errors were reported"))
    } else {
        errors.sort_by_key(|e| (e.line, e.column));
        Err(errors)
    }
}

/// Cross-declaration checks. Returns `None` when anything was reported.
fn assemble(decls: Decls, report: &mut dyn FnMut(Site, String)) -> Option<Program> {
    let mut ok = true;
    let mut fail = |site: Site, msg: String| {
        ok = false;
        report(site, msg);
    };

    let mut rule_ids: HashMap<String, Site> = HashMap::new();
    let mut claim = |id: &str, site: Site, fail: &mut dyn FnMut(Site, String)| {
        if let Some(first) = rule_ids.get(id) {
            fail(
                site,
                format!("duplicate rule id `{id}`, first declared on line {}", first.line),
            );
            false
        } else {
            rule_ids.insert(id.to_owned(), site);
            true
        }
    };

    let mut action_sites = BTreeMap::new();
    let mut crisp = Vec::new();
    for d in decls.crisp {
        if claim(&d.rule.id, d.id_site, &mut fail) {
            action_sites.insert(d.rule.id.clone(), d.action_site);
            crisp.push(d.rule);
        }
    }

    let mut term_names: HashMap<String, Site> = HashMap::new();
    let mut vars = Vec::new();
    for v in decls.vars {
        let mut terms = Vec::new();
        for (name, mf, site) in v.terms {
            if let Some(first) = term_names.get(&name) {
                fail(site, format!("term `{name}` already defined on line {}", first.line));
            } else {
                term_names.insert(name.clone(), site);
                terms.push((name, mf));
            }
        }
        if let Ok(var) = LinguisticVariable::new(v.name, terms) {
            vars.push(var);
        }
    }

    let mut fuzzy = Vec::new();
    for d in decls.fuzzy {
        let mut known = true;
        for (term, site) in &d.term_sites {
            if !term_names.contains_key(term) {
                fail(*site, format!("unknown fuzzy term `{term}`"));
                known = false;
            }
        }
        if !claim(&d.id, d.id_site, &mut fail) || !known {
            continue;
        }
        match FuzzyRule::new(d.id.clone(), d.expr, d.threshold, d.action) {
            Ok(r) => {
                action_sites.insert(d.id, d.action_site);
                fuzzy.push(r);
            }
            Err(e) => fail(d.id_site, e.to_string()),
        }
    }

    let vars = match FuzzyVariables::new(vars) {
        Ok(v) => Arc::new(v),
        Err(e) => {
            fail(Site { line: 1, col: 1 }, e.to_string());
            return None;
        }
    };
    let rules = RuleSet::new(crisp).ok();
    let fuzzy = FuzzyRuleSet::new((*vars).clone(), fuzzy).ok();

    let mut fences = Vec::new();
    let mut fence_ids: HashMap<String, Site> = HashMap::new();
    for f in decls.fences {
        if let Some(first) = fence_ids.get(&f.id) {
            fail(
                f.id_site,
                format!("duplicate fence id `{}`, first declared on line {}", f.id, first.line),
            );
            continue;
        }
        fence_ids.insert(f.id.clone(), f.id_site);
        let condition = if let Some(r) = rules.as_ref().and_then(|rs| rs.get(&f.rule_id)) {
            FenceCondition::Crisp(r.fingerprint.clone())
        } else if let Some(r) = fuzzy.as_ref().and_then(|fs| fs.get(&f.rule_id)) {
            FenceCondition::Fuzzy {
                rule: r.clone(),
                vars: Arc::clone(&vars),
            }
        } else {
            fail(
                f.rule_site,
                format!("fence `{}` refers to unknown rule `{}`", f.id, f.rule_id),
            );
            continue;
        };
        match FenceSpec::new(f.id.clone(), condition, f.enter, f.exit, f.hysteresis) {
            Ok(spec) => fences.push(FenceDecl {
                spec,
                rule_id: f.rule_id,
            }),
            Err(e) => fail(f.id_site, e.to_string()),
        }
    }

    if !ok {
        return None;
    }
    Some(Program {
        rules: rules?,
        fuzzy: fuzzy?,
        fences,
        action_sites,
    })
}

fn action_text(a: &ActionSpec) -> String {
    format!("{} {}", a.keyword(), quote(a.payload()))
}

fn expr_text(e: &FuzzyExpr) -> String {
    let operand = |e: &FuzzyExpr| match e {
        FuzzyExpr::Term { .. } => expr_text(e),
        _ => format!("({})", expr_text(e)),
    };
    match e {
        FuzzyExpr::Term { node, term } => format!("NODE {} IS {term}", quote(node.as_str())),
        FuzzyExpr::And(l, r) => format!("{} AND {}", operand(l), operand(r)),
        FuzzyExpr::Or(l, r) => format!("{} OR {}", operand(l), operand(r)),
        FuzzyExpr::Not(inner) => format!("NOT {}", operand(inner)),
    }
}

/// Renders a program back into the DSL. Parsing the output yields an equal
/// program.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for var in p.fuzzy.variables().variables() {
        let _ = writeln!(out, "FUZZIFY {}", var.name());
        for (name, mf) in var.terms() {
            let _ = writeln!(out, "  TERM {name} := {mf}");
        }
        let _ = writeln!(out, "END");
    }
    for r in p.rules.rules() {
        let _ = write!(out, "RULE {}", r.id);
        if r.priority != 0 {
            let _ = write!(out, " PRIORITY {}", r.priority);
        }
        out.push('\n');
        for (i, c) in r.fingerprint.clauses().iter().enumerate() {
            let _ = write!(
                out,
                "{} NODE {} VISIBLE",
                if i == 0 { "WHEN" } else { "AND" },
                quote(c.node.as_str())
            );
            if let Some(iv) = c.interval {
                let _ = write!(out, " RSSI BETWEEN {} AND {}", iv.low(), iv.high());
            }
            out.push('\n');
        }
        let _ = writeln!(out, "THEN {}", action_text(&r.action));
    }
    for r in p.fuzzy.rules() {
        let _ = writeln!(out, "FUZZYRULE {} THRESHOLD {}", r.id, r.threshold());
        let _ = writeln!(out, "WHEN {}", expr_text(&r.expr));
        let _ = writeln!(out, "THEN {}", action_text(&r.action));
    }
    for f in &p.fences {
        let _ = writeln!(
            out,
            "FENCE {} ON RULE {} ENTER_DWELL {} EXIT_DWELL {} HYSTERESIS {}",
            f.spec.id,
            f.rule_id,
            f.spec.enter_dwell(),
            f.spec.exit_dwell(),
            f.spec.hysteresis()
        );
    }
    out
}
