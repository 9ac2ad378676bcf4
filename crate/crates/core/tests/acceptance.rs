//! Acceptance gate: runs every criterion of the seeded suite and prints one
//! line per criterion.
//!
//! ```text
//! cargo test -p pptsep-core --test acceptance -- --nocapture
//! ```

use std::io::Write;

use pptsep_core::selftest::{run, SuiteConfig};

#[test]
fn acceptance_suite() {
    let results = run(&SuiteConfig::full());
    assert_eq!(results.len(), 9);
    // Written to the stdout handle directly so the table shows up even when
    // the harness captures output.
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for r in &results {
        writeln!(out, "{r}").unwrap();
    }
    drop(out);
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
