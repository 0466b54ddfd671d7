//! Runs every acceptance criterion at its stated size and prints one line per
//! criterion. Exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use parset::exec::default_workers;
use parset::harness::criteria::{run_criterion, SuiteParams, CATALOG};

const SEED: u64 = 42;

fn time_limit(id: u32) -> Option<Duration> {
    match id {
        1 | 2 => Some(Duration::from_secs(10)),
        12 => Some(Duration::from_secs(300)),
        _ => None,
    }
}

struct Line {
    id: u32,
    name: String,
    passed: bool,
    detail: String,
}

fn run_suite_all(out: &Path, extra: &[&str]) -> (Vec<u8>, Option<i32>) {
    let output = Command::new(env!("CARGO_BIN_EXE_parset"))
        .args(["suite", "all", "--seed", "42", "--out"])
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs");
    (output.stdout, output.status.code())
}

fn manifest_without_time(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("manifest.json")).expect("manifest written");
    let mut v: serde_json::Value = serde_json::from_str(&text).expect("manifest is json");
    v.as_object_mut().expect("object").remove("wall_time_seconds");
    v
}

fn determinism() -> Line {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let (out_a, code_a) = run_suite_all(&a, &[]);
    let (out_b, code_b) = run_suite_all(&b, &[]);
    let read = |d: &Path| std::fs::read(d.join("report.csv")).unwrap_or_default();
    let mut problems = Vec::new();
    if out_a != out_b {
        problems.push("stdout differs");
    }
    if read(&a) != read(&b) || read(&a).is_empty() {
        problems.push("report.csv differs");
    }
    if manifest_without_time(&a) != manifest_without_time(&b) {
        problems.push("manifest differs");
    }
    if code_a != code_b {
        problems.push("exit codes differ");
    }
    Line {
        id: 15,
        name: "determinism".into(),
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("two runs byte-identical ({} bytes)", out_a.len())
        } else {
            problems.join(", ")
        },
    }
}

fn smoke() -> (bool, String) {
    let tmp = tempfile::tempdir().expect("tempdir");
    let start = Instant::now();
    let (_, code) = run_suite_all(tmp.path(), &["--param", "samples=100"]);
    let elapsed = start.elapsed();
    let ok = matches!(code, Some(0 | 1)) && elapsed < Duration::from_secs(60);
    (ok, format!("suite all at samples=100: exit {code:?} in {:.1}s", elapsed.as_secs_f64()))
}

fn main() {
    // `cargo test -- --list` and filters from other targets should not trigger a full run
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let params = SuiteParams::new(SEED, default_workers());
    let mut lines = Vec::new();
    for entry in CATALOG {
        let start = Instant::now();
        let result = run_criterion(entry.id, &params);
        let elapsed = start.elapsed();
        let line = match result {
            Ok(c) => {
                let mut detail = match c.reports.iter().find(|r| !r.passed()) {
                    Some(r) => format!("failed {}: bound {:e} measured {:?}", r.bound_name, r.bound_value, r.measured),
                    None => format!("{} checks", c.reports.len()),
                };
                let mut passed = c.passed();
                if let Some(limit) = time_limit(entry.id) {
                    if elapsed > limit {
                        passed = false;
                        detail = format!("over time limit {limit:?}; {detail}");
                    }
                }
                Line { id: entry.id, name: entry.name.into(), passed, detail: format!("{detail} [{:.2}s]", elapsed.as_secs_f64()) }
            }
            Err(e) => Line { id: entry.id, name: entry.name.into(), passed: false, detail: format!("error: {e}") },
        };
        println!("AC{:<2} {:<28} {}  {}", line.id, line.name, if line.passed { "PASS" } else { "FAIL" }, line.detail);
        lines.push(line);
    }
    let det = determinism();
    println!("AC{:<2} {:<28} {}  {}", det.id, det.name, if det.passed { "PASS" } else { "FAIL" }, det.detail);
    lines.push(det);

    let (smoke_ok, smoke_detail) = smoke();
    println!("     {:<28} {}  {}", "smoke-run", if smoke_ok { "PASS" } else { "FAIL" }, smoke_detail);

    let failed = lines.iter().filter(|l| !l.passed).count() + usize::from(!smoke_ok);
    println!("\nacceptance: {} of {} criteria passed", lines.iter().filter(|l| l.passed).count(), lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
