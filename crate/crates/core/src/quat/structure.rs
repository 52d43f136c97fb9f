//! The standard hypercomplex structure `(I₀, J₀, K₀)` on ℝ⁴ⁿ and the
//! projection onto the matrices that anticommute with it.

use nalgebra::DMatrix;

/// `I₀, J₀, K₀` as `4n×4n` block matrices with `n×n` identity blocks.
#[derive(Clone, Debug)]
pub struct StructureMatrices {
    pub n: usize,
    pub i0: DMatrix<f64>,
    pub j0: DMatrix<f64>,
    pub k0: DMatrix<f64>,
}

/// Block patterns: `(block_row, block_col, sign)` for each nonzero identity block.
const I0_BLOCKS: [(usize, usize, f64); 4] = [(0, 1, -1.0), (1, 0, 1.0), (2, 3, -1.0), (3, 2, 1.0)];
const J0_BLOCKS: [(usize, usize, f64); 4] = [(0, 2, -1.0), (1, 3, 1.0), (2, 0, 1.0), (3, 1, -1.0)];
const K0_BLOCKS: [(usize, usize, f64); 4] = [(0, 3, -1.0), (1, 2, -1.0), (2, 1, 1.0), (3, 0, 1.0)];

fn assemble(n: usize, blocks: &[(usize, usize, f64); 4]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for &(bi, bj, sign) in blocks {
        for r in 0..n {
            m[(bi * n + r, bj * n + r)] = sign;
        }
    }
    m
}

impl StructureMatrices {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            i0: assemble(n, &I0_BLOCKS),
            j0: assemble(n, &J0_BLOCKS),
            k0: assemble(n, &K0_BLOCKS),
        }
    }

    /// Largest violation of `I₀H I₀ = J₀H J₀ = K₀H K₀ = −H`.
    pub fn commutant_defect(&self, h: &DMatrix<f64>) -> f64 {
        [&self.i0, &self.j0, &self.k0]
            .iter()
            .map(|s| (*s * h * *s + h).amax())
            .fold(0.0, f64::max)
    }

    /// `p(N) = ¼(N − I₀NI₀ − J₀NJ₀ − K₀NK₀)`.
    pub fn p_project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = m.clone();
        for s in [&self.i0, &self.j0, &self.k0] {
            out -= s * m * s;
        }
        out * 0.25
    }
}

/// Convenience wrapper building the structure for `m.nrows() / 4`.
pub fn p_project(m: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(m.nrows() % 4, 0);
    StructureMatrices::new(m.nrows() / 4).p_project(m)
}
