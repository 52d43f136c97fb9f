//! Derivatives, Hessians and the quaternionic Laplacian on periodic grids.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::spectral::spectral_partial;
use super::{GridError, GridShape, PeriodicScalarField};
use crate::quat::{HyperhermitianMatrix, Quaternion};

/// Differentiation scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeMode {
    /// Fourth-order central differences.
    #[default]
    Fd4,
    /// Discrete Fourier multiplication.
    Spectral,
}

/// `conj(e_i)·e_j = sign·e_k`, stored as `(k, sign)` at `[i][j]`.
pub(crate) const CONJ_UNIT_PRODUCTS: [[(usize, f64); 4]; 4] = [
    [(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)],
    [(1, -1.0), (0, 1.0), (3, -1.0), (2, 1.0)],
    [(2, -1.0), (3, 1.0), (0, 1.0), (1, -1.0)],
    [(3, -1.0), (2, -1.0), (1, 1.0), (0, 1.0)],
];

/// Periodic neighbour offsets for shifts `−2, −1, +1, +2`, per axis and coordinate.
pub(crate) struct Neighbours {
    points: usize,
    table: Vec<[isize; 4]>,
}

impl Neighbours {
    pub(crate) fn new(shape: &GridShape) -> Self {
        let points = shape.points();
        let mut table = Vec::with_capacity(shape.dims() * points);
        for a in 0..shape.dims() {
            for c in 0..points {
                table.push([-2, -1, 1, 2].map(|k| shape.offset(a, c, k)));
            }
        }
        Self { points, table }
    }

    #[inline]
    pub(crate) fn get(&self, axis: usize, coord: usize) -> &[isize; 4] {
        &self.table[axis * self.points + coord]
    }
}

#[inline]
fn at(values: &[f64], index: usize, offset: isize) -> f64 {
    values[(index as isize + offset) as usize]
}

#[inline]
pub(crate) fn fd4_first(values: &[f64], index: usize, nb: &[isize; 4], inv_h: f64) -> f64 {
    let (m2, m1, p1, p2) = (at(values, index, nb[0]), at(values, index, nb[1]), at(values, index, nb[2]), at(values, index, nb[3]));
    ((m2 - p2) + 8.0 * (p1 - m1)) * (inv_h / 12.0)
}

#[inline]
pub(crate) fn fd4_second(values: &[f64], index: usize, nb: &[isize; 4], inv_h2: f64) -> f64 {
    let (m2, m1, p1, p2) = (at(values, index, nb[0]), at(values, index, nb[1]), at(values, index, nb[2]), at(values, index, nb[3]));
    (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * values[index]) * (inv_h2 / 12.0)
}

fn check(shape: &GridShape, axis: usize, mode: DerivativeMode) -> Result<(), GridError> {
    if axis >= shape.dims() {
        return Err(GridError::AxisOutOfRange { axis, dims: shape.dims() });
    }
    check_mode(shape, mode)
}

fn check_mode(shape: &GridShape, mode: DerivativeMode) -> Result<(), GridError> {
    if mode == DerivativeMode::Fd4 && shape.points() < 5 {
        return Err(GridError::GridTooSmall { points: shape.points(), min: 5 });
    }
    Ok(())
}

fn partial_values(shape: &GridShape, values: &[f64], axis: usize, order: u32, mode: DerivativeMode) -> Vec<f64> {
    match mode {
        DerivativeMode::Spectral => spectral_partial(shape, values, axis, order),
        DerivativeMode::Fd4 => {
            let nb = Neighbours::new(shape);
            let inv_h = shape.points() as f64;
            shape.map_points(1, |index, coords, out| {
                let o = nb.get(axis, coords[axis]);
                out[0] = if order == 1 {
                    fd4_first(values, index, o, inv_h)
                } else {
                    fd4_second(values, index, o, inv_h * inv_h)
                };
            })
        }
    }
}

/// `∂^order f / ∂x_axis^order`, `order ∈ {1, 2}`.
pub fn partial(
    field: &PeriodicScalarField,
    axis: usize,
    order: u32,
    mode: DerivativeMode,
) -> Result<PeriodicScalarField, GridError> {
    let shape = field.shape();
    check(shape, axis, mode)?;
    if !(1..=2).contains(&order) {
        return Err(GridError::InvalidOrder(order));
    }
    PeriodicScalarField::from_values(shape, partial_values(shape, field.values(), axis, order, mode))
}

/// All `4n` first partial derivatives.
pub fn gradient(field: &PeriodicScalarField, mode: DerivativeMode) -> Result<Vec<PeriodicScalarField>, GridError> {
    (0..field.shape().dims()).map(|a| partial(field, a, 1, mode)).collect()
}

/// Pointwise access to second derivatives. A mixed entry with `a < b` is
/// `∂_b(∂_a f)`, so the result is symmetric by construction.
struct Seconds<'a> {
    values: &'a [f64],
    first: Vec<Vec<f64>>,
    kind: SecondsKind,
}

enum SecondsKind {
    Fd4 { nb: Neighbours, inv_h: f64 },
    Spectral { dims: usize, table: Vec<Option<Vec<f64>>> },
}

impl<'a> Seconds<'a> {
    fn new(field: &'a PeriodicScalarField, mode: DerivativeMode, pairs: &[(usize, usize)]) -> Self {
        let shape = field.shape();
        let values = field.values();
        let dims = shape.dims();
        let mut needs_first = vec![false; dims];
        for &(a, b) in pairs {
            if a != b {
                needs_first[a.min(b)] = true;
            }
        }
        let first = (0..dims)
            .map(|a| if needs_first[a] { partial_values(shape, values, a, 1, mode) } else { Vec::new() })
            .collect::<Vec<_>>();
        let kind = match mode {
            DerivativeMode::Fd4 => SecondsKind::Fd4 { nb: Neighbours::new(shape), inv_h: shape.points() as f64 },
            DerivativeMode::Spectral => {
                let mut table = vec![None; dims * dims];
                for &(a, b) in pairs {
                    let (a, b) = (a.min(b), a.max(b));
                    if table[a * dims + b].is_some() {
                        continue;
                    }
                    let v = if a == b {
                        spectral_partial(shape, values, a, 2)
                    } else {
                        spectral_partial(shape, &first[a], b, 1)
                    };
                    table[a * dims + b] = Some(v);
                }
                SecondsKind::Spectral { dims, table }
            }
        };
        Self { values, first, kind }
    }

    #[inline]
    fn get(&self, index: usize, coords: &[usize], a: usize, b: usize) -> f64 {
        let (a, b) = (a.min(b), a.max(b));
        match &self.kind {
            SecondsKind::Fd4 { nb, inv_h } => {
                if a == b {
                    fd4_second(self.values, index, nb.get(a, coords[a]), inv_h * inv_h)
                } else {
                    fd4_first(&self.first[a], index, nb.get(b, coords[b]), *inv_h)
                }
            }
            SecondsKind::Spectral { dims, table } => {
                table[a * dims + b].as_ref().expect("pair was requested")[index]
            }
        }
    }
}

/// Symmetric real Hessian per grid point, upper triangle packed row-major.
#[derive(Clone, Debug)]
pub struct RealHessianField {
    shape: GridShape,
    data: Vec<f64>,
}

impl RealHessianField {
    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn width(&self) -> usize {
        let d = self.shape.dims();
        d * (d + 1) / 2
    }

    pub fn at(&self, index: usize) -> DMatrix<f64> {
        let d = self.shape.dims();
        let w = self.width();
        let packed = &self.data[index * w..(index + 1) * w];
        let mut m = DMatrix::zeros(d, d);
        let mut k = 0;
        for a in 0..d {
            for b in a..d {
                m[(a, b)] = packed[k];
                m[(b, a)] = packed[k];
                k += 1;
            }
        }
        m
    }
}

/// Real Hessian of `field`, symmetric by construction.
pub fn real_hessian(field: &PeriodicScalarField, mode: DerivativeMode) -> Result<RealHessianField, GridError> {
    let shape = field.shape();
    check_mode(shape, mode)?;
    let d = shape.dims();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let seconds = Seconds::new(field, mode, &pairs);
    let data = shape.map_points(pairs.len(), |index, coords, out| {
        for (slot, &(a, b)) in out.iter_mut().zip(&pairs) {
            *slot = seconds.get(index, coords, a, b);
        }
    });
    Ok(RealHessianField { shape: shape.clone(), data })
}

/// One hyperhermitian matrix per grid point, packed as
/// `[U₁₁ … Uₙₙ, then (w,x,y,z) of U_rs for r < s in row-major order]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperhermitianField {
    shape: GridShape,
    data: Vec<f64>,
}

/// Packed width of an `n×n` hyperhermitian matrix.
pub fn packed_width(n: usize) -> usize {
    n + 2 * n * (n - 1)
}

/// Splits a packed matrix into its diagonal and strict upper quaternions.
pub fn unpack(n: usize, packed: &[f64]) -> (&[f64], Vec<Quaternion>) {
    let upper = packed[n..].chunks_exact(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect();
    (&packed[..n], upper)
}

impl HyperhermitianField {
    pub fn from_data(shape: &GridShape, data: Vec<f64>) -> Result<Self, GridError> {
        let expected = shape.len() * packed_width(shape.n());
        if data.len() != expected {
            return Err(GridError::ShapeMismatch { expected, found: data.len() });
        }
        Ok(Self { shape: shape.clone(), data })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn width(&self) -> usize {
        packed_width(self.n())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn packed(&self, index: usize) -> &[f64] {
        let w = self.width();
        &self.data[index * w..(index + 1) * w]
    }

    pub fn at(&self, index: usize) -> HyperhermitianMatrix {
        let (diag, upper) = unpack(self.n(), self.packed(index));
        HyperhermitianMatrix::from_upper(diag, &upper)
    }

    /// `Id + κ·self`.
    pub fn shifted_identity(&self, kappa: f64) -> Self {
        let n = self.n();
        let w = self.width();
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(k, &v)| if k % w < n { 1.0 + kappa * v } else { kappa * v })
            .collect();
        Self { shape: self.shape.clone(), data }
    }
}

/// Quaternionic Hessian `ι⁻¹(4·p(Hess_R f))` at every grid point.
///
/// Evaluated through the entrywise contraction
/// `(Hess_H f)_rs = Σ_{i,j} conj(e_i)·e_j·∂²f/∂x^r_i∂x^s_j`.
pub fn quat_hessian(field: &PeriodicScalarField, mode: DerivativeMode) -> Result<HyperhermitianField, GridError> {
    let shape = field.shape();
    check_mode(shape, mode)?;
    let n = shape.n();
    let mut pairs = Vec::new();
    for r in 0..n {
        for i in 0..4 {
            pairs.push((shape.axis(r, i), shape.axis(r, i)));
        }
        for s in (r + 1)..n {
            for i in 0..4 {
                for j in 0..4 {
                    pairs.push((shape.axis(r, i), shape.axis(s, j)));
                }
            }
        }
    }
    let seconds = Seconds::new(field, mode, &pairs);
    let data = shape.map_points(packed_width(n), |index, coords, out| {
        for r in 0..n {
            out[r] = (0..4).map(|i| seconds.get(index, coords, shape.axis(r, i), shape.axis(r, i))).sum();
        }
        let mut slot = n;
        for r in 0..n {
            for s in (r + 1)..n {
                let mut q = [0.0; 4];
                for (i, row) in CONJ_UNIT_PRODUCTS.iter().enumerate() {
                    for (j, &(k, sign)) in row.iter().enumerate() {
                        q[k] += sign * seconds.get(index, coords, shape.axis(r, i), shape.axis(s, j));
                    }
                }
                out[slot..slot + 4].copy_from_slice(&q);
                slot += 4;
            }
        }
    });
    Ok(HyperhermitianField { shape: shape.clone(), data })
}

/// `(κ/n)·Σ_{r,i} ∂²f/∂(x^r_i)²`, the quaternionic Laplacian of the flat metric.
pub fn quat_laplacian(field: &PeriodicScalarField, kappa: f64, mode: DerivativeMode) -> Result<PeriodicScalarField, GridError> {
    let shape = field.shape();
    check_mode(shape, mode)?;
    let scale = kappa / shape.n() as f64;
    let values = match mode {
        DerivativeMode::Fd4 => {
            let nb = Neighbours::new(shape);
            let inv_h2 = (shape.points() * shape.points()) as f64;
            shape.map_points(1, |index, coords, out| {
                let sum: f64 = (0..shape.dims()).map(|a| fd4_second(field.values(), index, nb.get(a, coords[a]), inv_h2)).sum();
                out[0] = scale * sum;
            })
        }
        DerivativeMode::Spectral => {
            let mut acc = vec![0.0; shape.len()];
            for a in 0..shape.dims() {
                for (s, v) in acc.iter_mut().zip(spectral_partial(shape, field.values(), a, 2)) {
                    *s += v;
                }
            }
            acc.into_iter().map(|v| scale * v).collect()
        }
    };
    PeriodicScalarField::from_values(shape, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn conj_unit_table_matches_quaternion_products() {
        for i in 0..4 {
            for j in 0..4 {
                let q = Quaternion::unit(i).conj() * Quaternion::unit(j);
                let (k, sign) = CONJ_UNIT_PRODUCTS[i][j];
                assert_eq!(q, Quaternion::unit(k).scale(sign));
            }
        }
    }

    #[test]
    fn fd4_first_derivative_error_bound() {
        let s = GridShape::new(1, 12).unwrap();
        let f = PeriodicScalarField::from_fn(&s, |x| (2.0 * PI * x[0]).sin());
        let d = partial(&f, 0, 1, DerivativeMode::Fd4).unwrap();
        let h = s.spacing();
        let bound = (2.0 * PI).powi(5) * h.powi(4) / 30.0;
        for i in 0..s.len() {
            let x = s.position(i);
            assert!((d.values()[i] - 2.0 * PI * (2.0 * PI * x[0]).cos()).abs() <= bound);
        }
    }

    #[test]
    fn constants_are_annihilated() {
        let s = GridShape::new(1, 6).unwrap();
        let f = PeriodicScalarField::constant(&s, 3.7);
        for mode in [DerivativeMode::Fd4, DerivativeMode::Spectral] {
            for a in 0..4 {
                for o in 1..=2 {
                    assert!(partial(&f, a, o, mode).unwrap().max_abs() <= 1e-13);
                }
            }
            assert!(quat_laplacian(&f, 1.0, mode).unwrap().max_abs() <= 1e-13);
        }
    }

    #[test]
    fn small_grid_rejected_in_fd4() {
        let s = GridShape::new(1, 4).unwrap();
        let f = PeriodicScalarField::zeros(&s);
        assert!(matches!(partial(&f, 0, 1, DerivativeMode::Fd4), Err(GridError::GridTooSmall { .. })));
        assert!(partial(&f, 0, 1, DerivativeMode::Spectral).is_ok());
        assert!(matches!(partial(&f, 4, 1, DerivativeMode::Spectral), Err(GridError::AxisOutOfRange { .. })));
    }

    #[test]
    fn mixed_entry_matches_analytic() {
        let s = GridShape::new(1, 16).unwrap();
        let f = PeriodicScalarField::from_fn(&s, |x| (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin());
        let hess = real_hessian(&f, DerivativeMode::Fd4).unwrap();
        let h4 = s.spacing().powi(4);
        for i in (0..s.len()).step_by(37) {
            let x = s.position(i);
            let exact = 4.0 * PI * PI * (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos();
            assert!((hess.at(i)[(0, 1)] - exact).abs() < 40.0 * h4 * 4.0 * PI.powi(6));
        }
    }
}
