//! The exterior-algebra oracle: `d² = 0`, `∂∂_J` of a quadratic potential and
//! the top coefficient of `Ωⁿ`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qma_flow::forms::{matrix_to_form, metric_from_form, Poly, PolyForm};
use qma_flow::quat::{moore_det, HyperhermitianMatrix, Quaternion};

fn main() {
    let n = 2;
    let x = Poly::var(0);
    let y = Poly::var(5);
    let f = &(&(&x * &x) * &y) + &(&Poly::constant(Complex64::new(0.0, 1.0)) * &y);
    let form = PolyForm::function(n, f);
    println!("|d d f|   = {:.3e}", form.d().d().max_abs());
    println!("|del del f| = {:.3e}", form.del().del().max_abs());

    let s = DMatrix::<f64>::identity(4 * n, 4 * n);
    let omega = PolyForm::dd_j(n, &Poly::quadratic(&s));
    println!("bidegrees of dd_J |x|^2: {:?}", omega.bidegrees());

    let g = HyperhermitianMatrix::from_upper(&[1.5, 0.8], &[Quaternion::new(0.2, -0.1, 0.3, 0.0)]);
    let kappa = 1.0;
    let omega = matrix_to_form(&g, kappa);
    let origin = [0.0; 8];
    let top = omega.power(n).top_coefficient(&origin);
    let det = moore_det(&g).unwrap();
    println!("Omega^2 top coefficient = {top}");
    println!("moore_det(G)            = {det}");
    println!("ratio                   = {}", top.re / det);
    let back = metric_from_form(&omega, &origin).unwrap();
    println!("metric round trip error = {:.3e}", (back.iota() - g.iota()).amax());
}
