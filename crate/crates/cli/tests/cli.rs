use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }
}

fn proxfence(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_proxfence"));
    cmd.args(args).env_remove("PROXFENCE_SEED");
    if let Some(s) = seed {
        cmd.env("PROXFENCE_SEED", s);
    }
    cmd.output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const RULES: &str = "\
RULE near-cafe
WHEN NODE \"cafe\" VISIBLE RSSI BETWEEN -70 AND 0
THEN SHOW \"coupon\"
FENCE cafe ON RULE near-cafe ENTER_DWELL 2 EXIT_DWELL 2 HYSTERESIS 3
";

const WORLD: &str = "\
P p0=-40 n=2.5 sigma=2 sens=-95 seed=42
B cafe 0 0
D walker -60 1 -> 60 1 @ 1
D sitter 4 3
";

#[test]
fn eval_success_and_output() {
    let d = Dir::new();
    let rules = d.file("rules.px", RULES);
    let cat = d.file("catalog.txt", "C coupon ; Coupon ; 10% off\n");
    let trace = d.file("trace.txt", "T 1 ; cafe=-60\nT 2 ; cafe=-80\n");
    let out = proxfence(
        &["eval", "--rules", s(&rules), "--catalog", s(&cat), "--trace", s(&trace)],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "F 1 near-cafe SHOW coupon\nV 1 ; coupon\nV 2 ; -\n"
    );
}

#[test]
fn parse_errors_exit_1_with_location() {
    let d = Dir::new();
    let rules = d.file(
        "rules.px",
        "RULE r\nWHEN NODE \"a\" VISIBLE RSSI BETWEEN -50 AND -70\nTHEN SHOW \"x\"\n",
    );
    let trace = d.file("trace.txt", "");
    let out = proxfence(&["monitor", "--rules", s(&rules), "--trace", s(&trace)], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("rules.px:2:36:"), "{err}");

    let good = d.file("good.px", RULES);
    let bad_trace = d.file("bad.txt", "T 2\nT 1\n");
    let out = proxfence(&["monitor", "--rules", s(&good), "--trace", s(&bad_trace)], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("bad.txt:2:3:"));
}

#[test]
fn runtime_errors_exit_2() {
    let d = Dir::new();
    let world = d.file("world.txt", WORLD);
    let out = proxfence(
        &[
            "relay",
            "--world",
            s(&world),
            "--origin",
            "nobody",
            "--ttl",
            "3",
            "--payload",
            "hi",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    let missing = d.0.path().join("missing.px");
    let out = proxfence(&["monitor", "--rules", s(&missing), "--trace", s(&world)], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_seeded() {
    let d = Dir::new();
    let world = d.file("world.txt", WORLD);
    let rules = d.file("rules.px", RULES);
    let cat = d.file("catalog.txt", "C coupon ; Coupon ; 10% off\n");
    let args = [
        "simulate",
        "--world",
        s(&world),
        "--rules",
        s(&rules),
        "--catalog",
        s(&cat),
        "--ticks",
        "120",
    ];
    let a = proxfence(&args, None);
    let b = proxfence(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.starts_with("D sitter\n"));
    assert!(text.contains("D walker\n"));
    assert!(text.contains(" cafe ENTER"));

    let same = proxfence(&args, Some("42"));
    assert_eq!(same.stdout, a.stdout);
    let other = proxfence(&args, Some("43"));
    assert_eq!(other.status.code(), Some(0));
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn relay_lists_every_device() {
    let d = Dir::new();
    let world = d.file(
        "world.txt",
        "P p0=-40 n=2 sens=-60\nD a 0 0\nD b 8 0\nD c 16 0\nD far 500 0\n",
    );
    let out = proxfence(
        &[
            "relay",
            "--world",
            s(&world),
            "--origin",
            "a",
            "--ttl",
            "4",
            "--payload",
            "hello",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "R a 0\nR b 1\nR c 2\nR far -\n");
}

#[test]
fn trace_then_eval_matches_simulate() {
    let d = Dir::new();
    let world = d.file("world.txt", WORLD);
    let rules = d.file("rules.px", RULES);
    let cat = d.file("catalog.txt", "C coupon ; Coupon ; 10% off\n");
    let trace = proxfence(
        &["trace", "--world", s(&world), "--device", "walker", "--ticks", "50"],
        None,
    );
    assert_eq!(trace.status.code(), Some(0));
    let trace = d.file("walker.txt", &String::from_utf8(trace.stdout).unwrap());
    let eval = proxfence(
        &["eval", "--rules", s(&rules), "--catalog", s(&cat), "--trace", s(&trace)],
        None,
    );
    let sim = proxfence(
        &[
            "simulate",
            "--world",
            s(&world),
            "--rules",
            s(&rules),
            "--catalog",
            s(&cat),
            "--ticks",
            "50",
        ],
        None,
    );
    let sim = String::from_utf8(sim.stdout).unwrap();
    let walker: String = sim
        .split("D walker\n")
        .nth(1)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("E "))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(String::from_utf8(eval.stdout).unwrap(), walker);
}
