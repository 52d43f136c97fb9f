//! Runs the verification suites with reduced sizes and a chosen seed.
//!
//! ```bash
//! cargo run --release --example verify_identities -- 7
//! ```

use qma_flow::cli::verify::{all_suites, SuiteSizes};
use qma_flow::cli::DEFAULT_SEED;
use qma_flow::forms::calibrate_kappa;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let kappa = calibrate_kappa().expect("calibration").kappa;
    let sizes = SuiteSizes { algebra_per_n: 200, formule: 20, lucio: 20, jets: 5 };
    for r in all_suites(seed, kappa, sizes) {
        let status = if r.passed() { "ok  " } else { "FAIL" };
        println!("{status} {:<50} {:>5} cases  max {:.2e}  tol {:.0e}", r.name, r.cases, r.max_residual, r.tolerance);
    }
}
