use std::process::Command;
use std::time::{Duration, Instant};

use fractafold::verify::{self, Options, Status, Suite};

struct Criterion {
    id: u32,
    name: &'static str,
    suites: &'static [Suite],
    budget: Option<Duration>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "K4 identities", suites: &[Suite::K4], budget: Some(Duration::from_secs(1)) },
    Criterion { id: 2, name: "decimation oracle", suites: &[Suite::Decimation], budget: Some(Duration::from_secs(30)) },
    Criterion { id: 3, name: "interval cross-validation", suites: &[Suite::Interval], budget: None },
    Criterion { id: 4, name: "tree kernel eigen-equations", suites: &[Suite::TreeKernel], budget: Some(Duration::from_secs(10)) },
    Criterion { id: 5, name: "tree resolution of identity", suites: &[Suite::TreeResolution], budget: None },
    Criterion { id: 6, name: "tight frame", suites: &[Suite::TreeFrame], budget: None },
    Criterion { id: 7, name: "Plancherel trend", suites: &[Suite::TreePlancherel], budget: Some(Duration::from_secs(120)) },
    Criterion { id: 8, name: "honeycomb", suites: &[Suite::Honeycomb, Suite::HexE6], budget: None },
    Criterion { id: 9, name: "ladder", suites: &[Suite::Ladder], budget: None },
    Criterion { id: 10, name: "triangular field", suites: &[Suite::Triangular], budget: None },
    Criterion { id: 11, name: "M product", suites: &[Suite::MProduct], budget: None },
];

fn run_criterion(c: &Criterion) -> bool {
    let start = Instant::now();
    let report = verify::run(c.suites, &Options::default());
    let elapsed = start.elapsed();
    let failed: Vec<_> = report.checks.iter().filter(|k| k.status == Status::Fail).collect();
    let in_budget = c.budget.is_none_or(|b| elapsed < b);
    let ok = failed.is_empty() && in_budget && !report.checks.is_empty();
    let budget = c.budget.map(|b| format!(" (limit {:.0?})", b)).unwrap_or_default();
    println!(
        "criterion {:>2}: {} {} [{} checks, {:.2?}{}]",
        c.id,
        if ok { "PASS" } else { "FAIL" },
        c.name,
        report.checks.len(),
        elapsed,
        budget
    );
    for k in &failed {
        println!("    failed {}/{}: residual {:e} vs tolerance {:e}", k.suite, k.check, k.residual, k.tolerance);
    }
    for k in report.checks.iter().filter(|k| k.status == Status::Info) {
        println!("    info {}/{}: {}", k.suite, k.check, k.residual);
    }
    if !in_budget {
        println!("    over the runtime limit");
    }
    ok
}

fn verify_output() -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_fractafold")).arg("verify").output().expect("run fractafold verify");
    assert!(out.status.success() || out.status.code() == Some(1), "verify crashed: {:?}", out.status);
    out.stdout
}

fn main() {
    let mut failures = Vec::new();
    for c in CRITERIA {
        if !run_criterion(c) {
            failures.push(c.id);
        }
    }

    let start = Instant::now();
    let first = verify_output();
    let second = verify_output();
    let identical = !first.is_empty() && first == second;
    println!(
        "criterion 12: {} determinism [{} bytes, two runs in {:.2?}]",
        if identical { "PASS" } else { "FAIL" },
        first.len(),
        start.elapsed()
    );
    if !identical {
        failures.push(12);
    }

    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
