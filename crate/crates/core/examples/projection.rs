//! The projection `p` onto real matrices commuting with the quaternionic structure.

use nalgebra::DMatrix;
use qma_flow::quat::{iota_inverse, p_project, StructureMatrices};

fn main() {
    let n = 2;
    let d = 4 * n;
    let s = DMatrix::from_fn(d, d, |a, b| ((a * 7 + b * 3) % 5) as f64 - 2.0);
    let s = (&s + s.transpose()) * 0.5;
    let structure = StructureMatrices::new(n);

    let ps = p_project(&s);
    println!("commutant defect of S    : {:.3e}", structure.commutant_defect(&s));
    println!("commutant defect of p(S) : {:.3e}", structure.commutant_defect(&ps));
    println!("|p(p(S)) - p(S)|         : {:.3e}", (p_project(&ps) - &ps).amax());
    println!("tr S = {}, tr p(S) = {}", s.trace(), ps.trace());

    let back = iota_inverse(&ps);
    println!("iota^-1(p(S)) hermitian defect: {:.3e}", back.hermitian_defect());
}
