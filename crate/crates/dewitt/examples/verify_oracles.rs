//! Runs the oracle verification suites programmatically and summarizes
//! the per-check maximum errors.
//!
//! ```bash
//! cargo run --release --example verify_oracles
//! ```

use dewitt::verify::{run_suites, Suite, VerifyConfig};

fn main() {
    let cfg = VerifyConfig {
        seed: 42,
        tol_floor: 1e-8,
    };
    let reports = run_suites(&Suite::ALL, &cfg);
    let mut ok = true;
    for report in &reports {
        println!("suite {:<10} {:>5.2} s", report.suite, report.seconds);
        for check in &report.checks {
            println!(
                "  {:<44} {:>10.3e} / {:<8.1e} {}",
                check.name,
                check.max_error,
                check.tolerance,
                if check.passed() { "ok" } else { "FAILED" }
            );
            ok &= check.passed();
        }
    }
    println!("\noverall: {}", if ok { "all checks passed" } else { "FAILURES" });
    std::process::exit(if ok { 0 } else { 1 });
}
