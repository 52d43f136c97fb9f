//! Quaternionic matrices, hyperhermitian matrices and the real representation ι.
//!
//! Real axes are ordered by quaternionic component first, then by index:
//! `(x¹₀,…,xⁿ₀, x¹₁,…,xⁿ₁, x¹₂,…,xⁿ₂, x¹₃,…,xⁿ₃)`, so real axis `i·n + r`
//! carries component `i` of the `r`-th quaternionic coordinate.

use nalgebra::DMatrix;

use super::eigen::symmetric_eigenvalues;
use super::quaternion::Quaternion;
use super::LinalgError;

/// Block layout of ι: entry `(block_row, block_col)` is `(component, sign)`,
/// meaning the `n×n` block equals `sign` times the real matrix of that
/// quaternionic component.
pub(crate) const IOTA_BLOCKS: [[(usize, f64); 4]; 4] = [
    [(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)],
    [(1, -1.0), (0, 1.0), (3, -1.0), (2, 1.0)],
    [(2, -1.0), (3, 1.0), (0, 1.0), (1, -1.0)],
    [(3, -1.0), (2, -1.0), (1, 1.0), (0, 1.0)],
];

/// Tolerance for the conjugate-transpose symmetry check.
pub const HYPERHERMITIAN_TOL: f64 = 1e-12;

/// Dense `n×n` quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatMatrix {
    n: usize,
    entries: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![Quaternion::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for r in 0..n {
            m.set(r, r, Quaternion::ONE);
        }
        m
    }

    pub fn from_entries(n: usize, entries: Vec<Quaternion>) -> Self {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn get(&self, r: usize, s: usize) -> Quaternion {
        self.entries[r * self.n + s]
    }

    pub fn set(&mut self, r: usize, s: usize, q: Quaternion) {
        self.entries[r * self.n + s] = q;
    }

    pub fn mul(&self, other: &QuatMatrix) -> QuatMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for s in 0..n {
                let mut acc = Quaternion::ZERO;
                for t in 0..n {
                    acc += self.get(r, t) * other.get(t, s);
                }
                out.set(r, s, acc);
            }
        }
        out
    }

    pub fn add(&self, other: &QuatMatrix) -> QuatMatrix {
        assert_eq!(self.n, other.n);
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| *a + *b).collect();
        Self { n: self.n, entries }
    }

    pub fn scale(&self, s: f64) -> QuatMatrix {
        Self { n: self.n, entries: self.entries.iter().map(|q| q.scale(s)).collect() }
    }

    pub fn conj_transpose(&self) -> QuatMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for s in 0..n {
                out.set(s, r, self.get(r, s).conj());
            }
        }
        out
    }

    /// Largest deviation from `conj(U) = transpose(U)`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for s in r..n {
                worst = worst.max(self.get(r, s).max_abs_diff(&self.get(s, r).conj()));
            }
        }
        worst
    }

    /// The real `4n×4n` representation.
    pub fn iota(&self) -> DMatrix<f64> {
        iota(self)
    }
}

/// ι(A + iB + jC + kD): the `4×4` block matrix of component matrices.
pub fn iota(m: &QuatMatrix) -> DMatrix<f64> {
    let n = m.n;
    let mut out = DMatrix::zeros(4 * n, 4 * n);
    for (bi, row) in IOTA_BLOCKS.iter().enumerate() {
        for (bj, &(comp, sign)) in row.iter().enumerate() {
            for r in 0..n {
                for s in 0..n {
                    out[(bi * n + r, bj * n + s)] = sign * m.get(r, s).components()[comp];
                }
            }
        }
    }
    out
}

/// Inverse of ι, reading the first block row. Entries of `real` outside the
/// image of ι are ignored.
pub fn iota_inverse(real: &DMatrix<f64>) -> QuatMatrix {
    assert_eq!(real.nrows(), real.ncols());
    assert_eq!(real.nrows() % 4, 0, "dimension must be a multiple of 4");
    let n = real.nrows() / 4;
    let mut out = QuatMatrix::zeros(n);
    for r in 0..n {
        for s in 0..n {
            let c = [0, 1, 2, 3].map(|k| real[(r, k * n + s)]);
            out.set(r, s, Quaternion::from_components(c));
        }
    }
    out
}

/// A quaternionic matrix with `conj(U) = transpose(U)`; real diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperhermitianMatrix(QuatMatrix);

impl HyperhermitianMatrix {
    /// Validates the symmetry and stores an exactly symmetrized copy.
    pub fn new(m: QuatMatrix) -> Result<Self, LinalgError> {
        let defect = m.hermitian_defect();
        if !(defect <= HYPERHERMITIAN_TOL * (1.0 + max_abs(&m))) {
            return Err(LinalgError::NotHyperhermitian { defect });
        }
        Ok(Self::symmetrized(&m))
    }

    /// Takes the upper triangle as authoritative.
    pub fn symmetrized(m: &QuatMatrix) -> Self {
        let n = m.n();
        let mut out = QuatMatrix::zeros(n);
        for r in 0..n {
            out.set(r, r, Quaternion::real(m.get(r, r).w));
            for s in r + 1..n {
                let q = m.get(r, s);
                out.set(r, s, q);
                out.set(s, r, q.conj());
            }
        }
        Self(out)
    }

    pub fn identity(n: usize) -> Self {
        Self(QuatMatrix::identity(n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = QuatMatrix::zeros(values.len());
        for (r, &v) in values.iter().enumerate() {
            m.set(r, r, Quaternion::real(v));
        }
        Self(m)
    }

    /// From real diagonal entries and the strict upper triangle, row by row.
    pub fn from_upper(diag: &[f64], upper: &[Quaternion]) -> Self {
        let n = diag.len();
        assert_eq!(upper.len(), n * (n - 1) / 2);
        let mut m = QuatMatrix::zeros(n);
        let mut k = 0;
        for r in 0..n {
            m.set(r, r, Quaternion::real(diag[r]));
            for s in r + 1..n {
                m.set(r, s, upper[k]);
                m.set(s, r, upper[k].conj());
                k += 1;
            }
        }
        Self(m)
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn as_quat(&self) -> &QuatMatrix {
        &self.0
    }

    pub fn into_quat(self) -> QuatMatrix {
        self.0
    }

    pub fn get(&self, r: usize, s: usize) -> Quaternion {
        self.0.get(r, s)
    }

    pub fn iota(&self) -> DMatrix<f64> {
        iota(&self.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.add(&other.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.n()).map(|r| self.get(r, r).w).sum()
    }
}

fn max_abs(m: &QuatMatrix) -> f64 {
    m.entries().iter().map(|q| q.norm()).fold(0.0, f64::max)
}

/// Spectral norm of a symmetric real matrix from its eigenvalues.
fn spectral_radius(eigs: &[f64]) -> f64 {
    eigs.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Sorted eigenvalues of ι(U) grouped into quadruples; one mean per group.
pub fn hh_eigenvalues(u: &HyperhermitianMatrix) -> Result<Vec<f64>, LinalgError> {
    let eigs = symmetric_eigenvalues(&u.iota());
    group_quadruples(&eigs)
}

fn group_quadruples(sorted: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let tol = 1e-8 * spectral_radius(sorted);
    sorted
        .chunks(4)
        .map(|quad| {
            let spread = quad[3] - quad[0];
            if spread > tol {
                Err(LinalgError::DegenerateSpectrum { spread, tolerance: tol })
            } else {
                Ok(quad.iter().sum::<f64>() / 4.0)
            }
        })
        .collect()
}

/// Moore determinant: the product of the quaternionic eigenvalues, so that
/// `moore_det(U)⁴ = det ι(U)`.
pub fn moore_det(u: &HyperhermitianMatrix) -> Result<f64, LinalgError> {
    Ok(hh_eigenvalues(u)?.iter().product())
}

pub fn is_positive_definite(u: &HyperhermitianMatrix, margin: f64) -> bool {
    match hh_eigenvalues(u) {
        Ok(eigs) => eigs.first().is_some_and(|&m| m > margin),
        Err(_) => false,
    }
}

/// Inverse through a real linear solve on ι(U).
pub fn hh_inverse(u: &HyperhermitianMatrix) -> Result<HyperhermitianMatrix, LinalgError> {
    let real = u.iota();
    let eigs = symmetric_eigenvalues(&real);
    let tol = 1e-12 * spectral_radius(&eigs);
    let min_abs = eigs.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if !(min_abs >= tol) || min_abs == 0.0 {
        return Err(LinalgError::SingularMatrix { min_abs_eigenvalue: min_abs });
    }
    let inv = real
        .lu()
        .try_inverse()
        .ok_or(LinalgError::SingularMatrix { min_abs_eigenvalue: min_abs })?;
    Ok(HyperhermitianMatrix::symmetrized(&iota_inverse(&inv)))
}

/// `Re tr(AB)`, which equals `¼ tr(ι(A)ι(B))`.
pub fn re_trace_product(a: &HyperhermitianMatrix, b: &HyperhermitianMatrix) -> f64 {
    assert_eq!(a.n(), b.n());
    let n = a.n();
    let mut acc = 0.0;
    for r in 0..n {
        for t in 0..n {
            acc += (a.get(r, t) * b.get(t, r)).w;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_2x2() -> HyperhermitianMatrix {
        HyperhermitianMatrix::from_upper(&[1.0, 2.0], &[Quaternion::J])
    }

    #[test]
    fn iota_of_one_and_i() {
        let one = QuatMatrix::identity(1);
        assert_eq!(iota(&one), DMatrix::identity(4, 4));
        let i = QuatMatrix::from_entries(1, vec![Quaternion::I]);
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[0., 1., 0., 0., -1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.],
        );
        assert_eq!(iota(&i), expected);
    }

    #[test]
    fn iota_round_trip() {
        let m = QuatMatrix::from_entries(
            2,
            vec![
                Quaternion::new(1., 2., 3., 4.),
                Quaternion::new(-1., 0.5, 0.25, 2.),
                Quaternion::new(0., 1., -1., 3.),
                Quaternion::new(7., 0., 0., -2.),
            ],
        );
        assert_eq!(iota_inverse(&iota(&m)), m);
    }

    #[test]
    fn example_eigenvalues_and_det() {
        let u = example_2x2();
        let eigs = hh_eigenvalues(&u).unwrap();
        let s5 = 5f64.sqrt();
        assert!((eigs[0] - (3.0 - s5) / 2.0).abs() < 1e-13);
        assert!((eigs[1] - (3.0 + s5) / 2.0).abs() < 1e-13);
        assert!((moore_det(&u).unwrap() - 1.0).abs() < 1e-13);
        let det_iota = u.iota().determinant();
        assert!((det_iota.powf(0.25) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_cases() {
        let d = HyperhermitianMatrix::diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(hh_eigenvalues(&d).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(moore_det(&d).unwrap(), 6.0);
        let inv = hh_inverse(&HyperhermitianMatrix::diagonal(&[2.0, 4.0])).unwrap();
        assert_eq!(inv, HyperhermitianMatrix::diagonal(&[0.5, 0.25]));
        let id = HyperhermitianMatrix::identity(3);
        assert_eq!(hh_inverse(&id).unwrap(), id);
    }

    #[test]
    fn positivity() {
        assert!(is_positive_definite(&HyperhermitianMatrix::identity(2), 0.5));
        assert!(!is_positive_definite(&HyperhermitianMatrix::diagonal(&[1.0, -0.1]), 0.0));
        assert!(is_positive_definite(&example_2x2(), 0.3));
        assert!(!is_positive_definite(&example_2x2(), 0.4));
    }

    #[test]
    fn trace_products() {
        let id = HyperhermitianMatrix::identity(2);
        assert_eq!(re_trace_product(&id, &id), 2.0);
        let d = HyperhermitianMatrix::diagonal(&[3.0, -1.5]);
        assert_eq!(re_trace_product(&id, &d), 1.5);
    }

    #[test]
    fn rejects_non_hyperhermitian() {
        let m = QuatMatrix::from_entries(
            2,
            vec![Quaternion::ONE, Quaternion::J, Quaternion::J, Quaternion::ONE],
        );
        assert!(matches!(HyperhermitianMatrix::new(m), Err(LinalgError::NotHyperhermitian { .. })));
    }

    #[test]
    fn singular_inverse_is_reported() {
        let z = HyperhermitianMatrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(hh_inverse(&z), Err(LinalgError::SingularMatrix { .. })));
    }

    #[test]
    fn degenerate_spectrum_on_non_image_input() {
        // quadruple grouping fails when the eigenvalues are not 4-fold
        let eigs = [0.0, 1.0, 2.0, 3.0];
        assert!(matches!(group_quadruples(&eigs), Err(LinalgError::DegenerateSpectrum { .. })));
    }
}
