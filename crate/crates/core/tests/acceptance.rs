//! Acceptance gate: each test runs one cross-validation check end to end and
//! prints a single pass/fail line.  Run with `--nocapture` to see the lines:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```

use std::process::Command;
use std::time::Instant;

use stoplab::report::Check;
use stoplab::verify::run_suite;

fn run_check(group: &str) -> Check {
    let start = Instant::now();
    let mut checks = run_suite(group, 0).expect("suite runs");
    assert_eq!(checks.len(), 1, "group '{group}' should yield one check");
    let check = checks.remove(0);
    println!("{} [{:.1}s]", check.line(), start.elapsed().as_secs_f64());
    check
}

fn assert_pass(group: &str) {
    let check = run_check(group);
    assert!(check.pass, "{}", check.line());
}

#[test]
fn criterion_01_moser_limit() {
    assert_pass("moser");
}

#[test]
fn criterion_02_discrete_matrix() {
    assert_pass("matrix");
}

#[test]
fn criterion_03_cutoffs() {
    assert_pass("cutoffs");
}

#[test]
fn criterion_04_limit_values() {
    assert_pass("limits");
}

#[test]
fn criterion_05_ode_residuals() {
    assert_pass("ode");
}

#[test]
fn criterion_06_beta_strategy() {
    assert_pass("beta");
}

#[test]
fn criterion_07_cutoff_simulation() {
    assert_pass("cutoff-sim");
}

#[test]
fn criterion_08_lindley() {
    assert_pass("lindley");
}

#[test]
fn criterion_09_sandwiches() {
    assert_pass("sandwich");
}

#[test]
fn criterion_10_distributional_convergence() {
    assert_pass("ks");
}

#[test]
fn criterion_11_verify_is_deterministic() {
    // Two full runs of the verification report must agree byte for byte.
    let exe = env!("CARGO_BIN_EXE_stoplab");
    let run = || {
        let out = Command::new(exe)
            .args(["verify", "--suite", "all", "--seed", "0"])
            .output()
            .expect("run stoplab verify");
        assert!(
            out.status.success(),
            "verify failed:\n{}",
            String::from_utf8_lossy(&out.stdout)
        );
        out.stdout
    };
    let first = run();
    let second = run();
    let pass = first == second;
    println!(
        "{} criterion-11-determinism | measured: two verify runs {} | expected: byte-identical stdout",
        if pass { "PASS" } else { "FAIL" },
        if pass { "identical" } else { "differ" }
    );
    assert!(pass, "verify output is not deterministic");
}
