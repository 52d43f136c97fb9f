//! Deterministic reductions over grid values.
//!
//! Every sum goes through one fixed binary tree, so results are bit-identical
//! for any number of worker threads.

use super::PeriodicScalarField;

const LEAF: usize = 256;
const PARALLEL_MIN: usize = 1 << 15;

pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    if values.len() >= PARALLEL_MIN {
        let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
        a + b
    } else {
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Average over the unit-volume torus, `h^{4n}·Σ values`.
pub fn mean(field: &PeriodicScalarField) -> f64 {
    pairwise_sum(field.values()) / field.values().len() as f64
}

/// `mean(field · weight)`.
pub fn weighted_integral(field: &PeriodicScalarField, weight: &PeriodicScalarField) -> f64 {
    assert_eq!(field.shape(), weight.shape(), "grid mismatch");
    let prod: Vec<f64> = field.values().iter().zip(weight.values()).map(|(a, b)| a * b).collect();
    pairwise_sum(&prod) / prod.len() as f64
}
