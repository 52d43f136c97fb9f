//! Hamilton products, hyperhermitian matrices, ι and the Moore determinant.
//!
//! ```bash
//! cargo run --example quaternions
//! ```

use qma_flow::quat::{hh_eigenvalues, hh_inverse, iota, moore_det, quat_mul, HyperhermitianMatrix, Quaternion};

fn main() {
    let (i, j) = (Quaternion::I, Quaternion::J);
    println!("i*j = {:?}", quat_mul(i, j));
    println!("j*i = {:?}", quat_mul(j, i));

    // [[2, q], [q̄, 3]] with q = 0.5 + 0.25i − 0.1k
    let q = Quaternion::new(0.5, 0.25, 0.0, -0.1);
    let u = HyperhermitianMatrix::from_upper(&[2.0, 3.0], &[q]);
    let det = moore_det(&u).unwrap();
    let real = iota(u.as_quat()).determinant();
    println!("moore_det = {det}, expected 2*3 - |q|^2 = {}", 6.0 - q.norm_sqr());
    println!("moore_det^4 = {:.12}, det iota(U) = {real:.12}", det.powi(4));
    println!("eigenvalues = {:?}", hh_eigenvalues(&u).unwrap());

    let inv = hh_inverse(&u).unwrap();
    let product = u.as_quat().mul(inv.as_quat());
    println!("U * U^-1:");
    for r in 0..2 {
        println!("  {:?}  {:?}", product.get(r, 0), product.get(r, 1));
    }
}
