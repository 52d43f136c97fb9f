//! Cyclic Jacobi eigenvalue iteration for real symmetric matrices.
//!
//! The sweep order is fixed (row-major over the strict upper triangle), so
//! repeated calls on the same input give bit-identical results.

use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a symmetric matrix, ascending. Only the upper triangle is read.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let (vals, _) = jacobi(m, false);
    vals
}

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (vals, vecs) = jacobi(m, true);
    (vals, vecs.expect("eigenvectors requested"))
}

fn jacobi(m: &DMatrix<f64>, want_vectors: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    let mut a = DMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] });
    let mut v = want_vectors.then(|| DMatrix::identity(n, n));

    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return finish(a, v);
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, p, q, c, s);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    finish(a, v)
}

/// `A ← Pᵀ A P` for the plane rotation in (p, q).
fn rotate(a: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
}

fn finish(a: DMatrix<f64>, v: Option<DMatrix<f64>>) -> (Vec<f64>, Option<DMatrix<f64>>) {
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = v.map(|v| DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn diagonal_matrix() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0]));
        assert_eq!(symmetric_eigenvalues(&m), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn reconstructs_random_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [3, 8, 12] {
            let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let m = &b + b.transpose();
            let (vals, vecs) = symmetric_eigen(&m);
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals));
            let back = &vecs * d * vecs.transpose();
            assert!((back - &m).amax() < 1e-12);
            let orth = vecs.transpose() * &vecs - DMatrix::identity(n, n);
            assert!(orth.amax() < 1e-13);
        }
    }

    #[test]
    fn repeated_calls_are_bit_identical() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let b = DMatrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
        let m = &b + b.transpose();
        let a = symmetric_eigenvalues(&m);
        let b = symmetric_eigenvalues(&m);
        assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }
}
