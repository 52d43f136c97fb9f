//! FD4 against spectral derivatives of `sin(2πx)` on refining grids.

use std::f64::consts::TAU;

use qma_flow::grid::{partial, DerivativeMode, GridShape, PeriodicScalarField};

fn main() {
    println!("{:>4} {:>12} {:>12} {:>12}", "N", "fd4 d1", "fd4 d2", "spectral d2");
    for points in [8, 16, 32] {
        let shape = GridShape::new(1, points).unwrap();
        let f = PeriodicScalarField::from_fn(&shape, |x| (TAU * x[0]).sin());
        let d1 = PeriodicScalarField::from_fn(&shape, |x| TAU * (TAU * x[0]).cos());
        let d2 = f.map(|v| -TAU * TAU * v);

        let e1 = partial(&f, 0, 1, DerivativeMode::Fd4).unwrap().max_abs_diff(&d1);
        let e2 = partial(&f, 0, 2, DerivativeMode::Fd4).unwrap().max_abs_diff(&d2);
        let es = partial(&f, 0, 2, DerivativeMode::Spectral).unwrap().max_abs_diff(&d2);
        println!("{points:>4} {e1:>12.3e} {e2:>12.3e} {es:>12.3e}");
    }
}
