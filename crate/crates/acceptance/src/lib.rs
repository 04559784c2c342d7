//! Helpers shared by the acceptance criteria.

use std::io::Write;

use mgd::linalg::ComplexMatrix;
use mgd::states::{random_density, random_pure};

/// Writes one PASS/FAIL line to stderr, bypassing the test harness's
/// output capture, and returns `pass`.
pub fn report(id: &str, name: &str, pass: bool, detail: &str) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[{id}] {verdict} {name}: {detail}");
    pass
}

/// Random state cycling through full-rank, rank-2 and pure draws.
pub fn random_state(n: usize, seed: u64) -> ComplexMatrix {
    match seed % 3 {
        0 => random_density(n, 1 << n, seed).unwrap(),
        1 => random_density(n, 2, seed).unwrap(),
        _ => random_pure(n, seed).unwrap(),
    }
}
