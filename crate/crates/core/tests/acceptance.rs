//! Runs the twelve acceptance criteria at their pinned tolerances and prints
//! one line per criterion.

use qdirac::verify::{self, Criterion, VerifyOptions};

fn report(c: &Criterion) {
    println!("{}", c.summary());
    for check in &c.checks {
        println!("        {} {:?} measured {:e} {}", check.name, check.bound, check.measured, if check.pass { "ok" } else { "FAILED" });
    }
}

#[test]
fn acceptance() {
    let results = verify::run_all(&VerifyOptions::default()).expect("suite runs");
    assert_eq!(results.len(), 12);
    for c in &results {
        report(c);
    }
    let failed: Vec<u8> = results.iter().filter(|c| !c.pass()).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

#[test]
fn tightened_tolerances_fail() {
    let opts = VerifyOptions { tol_scale: 1e-30, ..VerifyOptions::default() };
    let c = verify::zitterbewegung_oracle(&opts);
    assert!(!c.pass());
}
