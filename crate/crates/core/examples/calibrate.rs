//! Computes κ and `c_grad` from the symbolic oracle and prints every residual.

use qma_flow::forms::calibrate_kappa;

fn main() {
    let report = calibrate_kappa().expect("calibration");
    println!("kappa  = {}", report.kappa);
    println!("c_grad = {}", report.c_grad);
    for (name, value) in &report.residuals {
        println!("  {name:<30} {value:.3e}");
    }
}
