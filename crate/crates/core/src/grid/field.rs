use rayon::prelude::*;

use super::GridError;

/// Uniform periodic grid over the unit torus `[0,1)^{4n}` with `N` points per
/// axis. Values are stored row-major over axes in the order
/// `x¹₀…xⁿ₀, x¹₁…xⁿ₁, x¹₂…xⁿ₂, x¹₃…xⁿ₃` (axis `i·n + r`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridShape {
    n: usize,
    points: usize,
    len: usize,
    strides: Vec<usize>,
}

impl GridShape {
    pub fn new(n: usize, points: usize) -> Result<Self, GridError> {
        if !(1..=2).contains(&n) {
            return Err(GridError::UnsupportedDimension(n));
        }
        if points < 2 {
            return Err(GridError::GridTooSmall { points, min: 2 });
        }
        let dims = 4 * n;
        let mut strides = vec![1usize; dims];
        for a in (0..dims - 1).rev() {
            strides[a] = strides[a + 1] * points;
        }
        Ok(Self { n, points, len: strides[0] * points, strides })
    }

    /// Quaternionic dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dims(&self) -> usize {
        4 * self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points as f64
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Real axis index of component `i` of quaternionic coordinate `r`.
    pub fn axis(&self, r: usize, i: usize) -> usize {
        i * self.n + r
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut c = vec![0; self.dims()];
        for a in (0..self.dims()).rev() {
            c[a] = index % self.points;
            index /= self.points;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| (c % self.points) * s).sum()
    }

    pub fn position(&self, index: usize) -> Vec<f64> {
        let h = self.spacing();
        self.coords(index).into_iter().map(|c| c as f64 * h).collect()
    }

    /// Signed index offset of the periodic neighbour `coord + shift` along `axis`.
    #[inline]
    pub(crate) fn offset(&self, axis: usize, coord: usize, shift: isize) -> isize {
        let n = self.points as isize;
        let target = (coord as isize + shift).rem_euclid(n);
        (target - coord as isize) * self.strides[axis] as isize
    }

    /// Evaluates `f(index, coords, out)` at every point, writing `width`
    /// values per point. Slabs along axis 0 are processed in parallel; the
    /// output does not depend on the worker count.
    pub fn map_points<F>(&self, width: usize, f: F) -> Vec<f64>
    where
        F: Fn(usize, &[usize], &mut [f64]) + Sync,
    {
        let slab = self.strides[0];
        let mut out = vec![0.0; self.len * width];
        out.par_chunks_mut(slab * width).enumerate().for_each(|(c0, chunk)| {
            let mut coords = vec![0usize; self.dims()];
            coords[0] = c0;
            for local in 0..slab {
                let index = c0 * slab + local;
                f(index, &coords, &mut chunk[local * width..(local + 1) * width]);
                // odometer over axes 1..dims
                for a in (1..self.dims()).rev() {
                    coords[a] += 1;
                    if coords[a] < self.points {
                        break;
                    }
                    coords[a] = 0;
                }
            }
        });
        out
    }
}

/// Real values on a [`GridShape`].
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicScalarField {
    shape: GridShape,
    values: Vec<f64>,
}

impl PeriodicScalarField {
    pub fn zeros(shape: &GridShape) -> Self {
        Self::constant(shape, 0.0)
    }

    pub fn constant(shape: &GridShape, c: f64) -> Self {
        Self { shape: shape.clone(), values: vec![c; shape.len()] }
    }

    pub fn from_values(shape: &GridShape, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != shape.len() {
            return Err(GridError::ShapeMismatch { expected: shape.len(), found: values.len() });
        }
        Ok(Self { shape: shape.clone(), values })
    }

    /// Samples `f(position)` at every grid point.
    pub fn from_fn<F>(shape: &GridShape, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let h = shape.spacing();
        let values = shape.map_points(1, |_, coords, out| {
            let x: Vec<f64> = coords.iter().map(|&c| c as f64 * h).collect();
            out[0] = f(&x);
        });
        Self { shape: shape.clone(), values }
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> Self {
        Self { shape: self.shape.clone(), values: self.values.par_iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Sync + Send) -> Self {
        assert_eq!(self.shape, other.shape, "grid mismatch");
        let values = self.values.par_iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { shape: self.shape.clone(), values }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn oscillation(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Largest pointwise `|self − other|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Translates by `shift[a]` grid points along each axis.
    pub fn shifted(&self, shift: &[isize]) -> Self {
        let shape = &self.shape;
        let values = shape.map_points(1, |index, coords, out| {
            let mut src = index as isize;
            for (a, &s) in shift.iter().enumerate() {
                src += shape.offset(a, coords[a], -s);
            }
            out[0] = self.values[src as usize];
        });
        Self { shape: shape.clone(), values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_row_major_in_axis_order() {
        let s = GridShape::new(1, 3).unwrap();
        assert_eq!(s.len(), 81);
        assert_eq!(s.stride(0), 27);
        assert_eq!(s.stride(3), 1);
        let c = s.coords(s.index(&[2, 0, 1, 2]));
        assert_eq!(c, vec![2, 0, 1, 2]);
        let s2 = GridShape::new(2, 3).unwrap();
        assert_eq!(s2.axis(1, 0), 1);
        assert_eq!(s2.axis(0, 1), 2);
        assert_eq!(s2.axis(1, 3), 7);
    }

    #[test]
    fn map_points_visits_coords_in_order() {
        let s = GridShape::new(1, 4).unwrap();
        let v = s.map_points(1, |index, coords, out| {
            assert_eq!(s.index(coords), index);
            out[0] = index as f64;
        });
        assert!(v.iter().enumerate().all(|(i, &x)| x == i as f64));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(GridShape::new(3, 8), Err(GridError::UnsupportedDimension(3))));
        assert!(GridShape::new(1, 1).is_err());
        let s = GridShape::new(1, 4).unwrap();
        assert!(PeriodicScalarField::from_values(&s, vec![0.0; 3]).is_err());
    }

    #[test]
    fn shift_wraps_around() {
        let s = GridShape::new(1, 4).unwrap();
        let f = PeriodicScalarField::from_fn(&s, |x| x[0]);
        let g = f.shifted(&[1, 0, 0, 0]);
        assert_eq!(g.values()[s.index(&[1, 0, 0, 0])], 0.0);
        assert_eq!(g.values()[s.index(&[0, 0, 0, 0])], 0.75);
    }
}
