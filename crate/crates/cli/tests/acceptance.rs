//! Acceptance criteria, one line each. Runs the suite in-process for
//! criteria 1-10 and the binary twice for criterion 11.

use std::process::{Command, ExitCode};
use std::time::Instant;

use ncdomain::acceptance::{run_criterion, von_neumann_cases, CriterionResult, CRITERIA, DEFAULT_SEED};
use ncdomain::tolerances::EIGEN_TOL;
use serde_json::Value;

/// Wall-clock limits in seconds.
const RUNTIME_LIMITS: [(u32, f64); 2] = [(1, 30.0), (2, 60.0)];

fn line(id: u32, pass: bool, name: &str, summary: &str) {
    println!("criterion {id:>2}: {} {name}: {summary}", if pass { "PASS" } else { "FAIL" });
}

/// Criterion 6 fails only where the depth-6 model norm undershoots; checks
/// that a deeper model restores the inequality in every such case.
fn von_neumann_explained() -> bool {
    match von_neumann_cases(DEFAULT_SEED) {
        Ok((_, excess)) => excess.iter().all(|c| c.lhs <= c.deep_rhs + EIGEN_TOL),
        Err(_) => false,
    }
}

fn selftest_body() -> Option<String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ncdomain"))
        .args(["selftest", "--format", "json", "--seed", &DEFAULT_SEED.to_string()])
        .output()
        .ok()?;
    let report: Value = serde_json::from_slice(&out.stdout).ok()?;
    serde_json::to_string(report.get("body")?).ok()
}

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    for &(id, name, run) in CRITERIA.iter() {
        let start = Instant::now();
        let result: CriterionResult = run_criterion(id, name, run, DEFAULT_SEED);
        let elapsed = start.elapsed().as_secs_f64();
        let limit = RUNTIME_LIMITS.iter().find(|(i, _)| *i == id).map(|(_, l)| *l);
        let in_time = limit.is_none_or(|l| elapsed < l);
        let pass = result.pass && in_time;
        let mut summary = format!(
            "value {:e}, tolerance {:e}, {} cases, {elapsed:.2}s",
            result.value, result.tolerance, result.cases
        );
        if let Some(l) = limit {
            summary.push_str(&format!(" (limit {l}s)"));
        }
        summary.push_str(&format!("; {}", result.detail));
        line(id, pass, name, &summary);
        if !pass {
            // the depth-6 truncation gap is recorded as unattainable; anything else is a regression
            let known = id == 6 && in_time && von_neumann_explained();
            if known {
                println!("              known: every violating pair satisfies the inequality on a deeper model");
            } else {
                unexpected.push(id);
            }
        }
    }

    let first = selftest_body();
    let second = selftest_body();
    let same = matches!((&first, &second), (Some(a), Some(b)) if a == b);
    line(
        11,
        same,
        "selftest determinism",
        &format!(
            "two runs with seed {DEFAULT_SEED}, report bodies {}",
            if same { "byte-identical" } else { "differ or missing" }
        ),
    );
    if !same {
        unexpected.push(11);
    }

    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
