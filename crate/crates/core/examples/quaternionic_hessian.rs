//! `Hess_H` of a quadratic and of a mixed wave, and the quaternionic Laplacian.

use std::f64::consts::TAU;

use qma_flow::grid::{quat_hessian, quat_laplacian, DerivativeMode, GridShape, PeriodicScalarField};

fn main() {
    let kappa = 1.0;
    let shape = GridShape::new(2, 5).unwrap();
    let (a, b) = (shape.axis(0, 0), shape.axis(1, 1));
    let f = PeriodicScalarField::from_fn(&shape, |x| 0.1 * (TAU * x[a]).cos() * (TAU * x[b]).sin());

    let hess = quat_hessian(&f, DerivativeMode::Fd4).unwrap();
    let index = shape.index(&[1; 8]);
    let u = hess.at(index);
    println!("Hess_H f at {:?}:", shape.position(index));
    for r in 0..2 {
        println!("  {:?}  {:?}", u.get(r, 0), u.get(r, 1));
    }

    let lap = quat_laplacian(&f, kappa, DerivativeMode::Fd4).unwrap();
    println!("kappa/n * Re tr Hess_H f = {:.6}", kappa / 2.0 * u.trace_re());
    println!("Laplacian                = {:.6}", lap.values()[index]);
}
