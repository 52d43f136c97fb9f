//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

/// FD4 first-derivative multiplier of `sin/cos(2πkx)` on `N` points.
pub fn fd4_first_symbol(k: f64, points: usize) -> f64 {
    let h = 1.0 / points as f64;
    let t = TAU * k * h;
    (8.0 * t.sin() - (2.0 * t).sin()) / (6.0 * h)
}

/// FD4 second-derivative multiplier (negated) of `sin/cos(2πkx)` on `N` points.
pub fn fd4_second_symbol(k: f64, points: usize) -> f64 {
    let h = 1.0 / points as f64;
    let t = TAU * k * h;
    (30.0 - 32.0 * t.cos() + 2.0 * (2.0 * t).cos()) / (12.0 * h * h)
}

/// Modified Bessel `I₀` by its power series.
pub fn bessel_i0(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= (x / 2.0) * (x / 2.0) / (k as f64 * k as f64);
        sum += term;
    }
    sum
}
