//! Differential forms on ℝ⁴ⁿ with polynomial coefficients, in the complex
//! frame adapted to `I₀`.
//!
//! Frame covectors are indexed `0 … 4n−1`: first the `(1,0)` covectors
//! `θ_r = dx^r_0 + i·dx^r_1` and `θ_{n+r} = dx^r_2 + i·dx^r_3`, then their
//! conjugates in the same order. A basis `k`-form is a bitmask of frame
//! indices, wedged in increasing order.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::Poly;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct PolyForm {
    n: usize,
    terms: BTreeMap<u16, Poly>,
}

/// Sign of `e_a ∧ e_b` relative to the sorted basis element, or `None` if they overlap.
fn wedge_sign(a: u16, b: u16) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut bits = b;
    while bits != 0 {
        let j = bits.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        bits &= bits - 1;
    }
    Some(if swaps % 2 == 0 { 1.0 } else { -1.0 })
}

/// Sorts a list of distinct frame indices, returning the mask and permutation sign.
fn sort_indices(list: &[usize]) -> Option<(u16, f64)> {
    let mut v = list.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    let mask = v.iter().fold(0u16, |m, &k| m | (1 << k));
    Some((mask, sign))
}

fn indices(mask: u16) -> Vec<usize> {
    (0..16).filter(|k| mask & (1 << k) != 0).collect()
}

impl PolyForm {
    pub fn zero(n: usize) -> Self {
        assert!((1..=2).contains(&n), "forms are implemented for n <= 2");
        Self { n, terms: BTreeMap::new() }
    }

    pub fn function(n: usize, f: Poly) -> Self {
        let mut out = Self::zero(n);
        out.add_term(0, f);
        out
    }

    /// Frame covector number `k`.
    pub fn frame(n: usize, k: usize) -> Self {
        let mut out = Self::zero(n);
        out.add_term(1 << k, Poly::constant(1.0));
        out
    }

    /// Constant 1-form `Σ c_k·(frame k)`.
    pub fn covector(n: usize, coeffs: &[Complex64]) -> Self {
        let mut out = Self::zero(n);
        for (k, &c) in coeffs.iter().enumerate() {
            out.add_term(1 << k, Poly::constant(c));
        }
        out
    }

    /// The real covector `dx_a` (axis `a = i·n + r`).
    pub fn dx(n: usize, a: usize) -> Self {
        let (r, i) = (a % n, a / n);
        let base = if i < 2 { r } else { n + r };
        let (c, cbar) = if i % 2 == 0 { (0.5 * ONE, 0.5 * ONE) } else { (-0.5 * I, 0.5 * I) };
        let mut out = Self::zero(n);
        out.add_term(1 << base, Poly::constant(c));
        out.add_term(1 << (2 * n + base), Poly::constant(cbar));
        out
    }

    /// Row vector of frame covector `k` in the real basis `dx_0 … dx_{4n−1}`.
    pub fn frame_row(n: usize, k: usize) -> Vec<Complex64> {
        let conj = k >= 2 * n;
        let base = k % (2 * n);
        let (r, pair) = (base % n, base / n);
        let mut row = vec![Complex64::new(0.0, 0.0); 4 * n];
        row[(2 * pair) * n + r] = ONE;
        row[(2 * pair + 1) * n + r] = if conj { -I } else { I };
        row
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u16, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mask: u16) -> Poly {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, mask: u16, p: Poly) {
        if p.is_zero() {
            return;
        }
        let slot = self.terms.entry(mask).or_default();
        *slot = &*slot + &p;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Poly::max_abs).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero(self.n);
        for (m, p) in &self.terms {
            out.add_term(*m, p.scale(c));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                if let Some(sign) = wedge_sign(*ma, *mb) {
                    out.add_term(ma | mb, (pa * pb).scale(sign));
                }
            }
        }
        out
    }

    /// `self ∧ … ∧ self` (`k` factors); `k = 0` gives the constant 1.
    pub fn power(&self, k: usize) -> Self {
        let mut out = Self::function(self.n, Poly::constant(1.0));
        for _ in 0..k {
            out = out.wedge(self);
        }
        out
    }

    /// Bidegree `(p, q)` of a basis mask.
    pub fn bidegree_of(&self, mask: u16) -> (u32, u32) {
        let low = (1u16 << (2 * self.n)) - 1;
        ((mask & low).count_ones(), (mask & !low).count_ones())
    }

    /// Projection onto forms of bidegree `(p, q)`.
    pub fn component(&self, p: u32, q: u32) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            if self.bidegree_of(*m) == (p, q) {
                out.add_term(*m, c.clone());
            }
        }
        out
    }

    /// All bidegrees with a nonzero component.
    pub fn bidegrees(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<_> = self.terms.keys().map(|m| self.bidegree_of(*m)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Coefficient of `f` along frame covector `k` in `df`.
    fn frame_derivative(&self, f: &Poly, k: usize) -> Poly {
        let n = self.n;
        let conj = k >= 2 * n;
        let base = k % (2 * n);
        let (r, pair) = (base % n, base / n);
        let re = f.derivative((2 * pair) * n + r);
        let im = f.derivative((2 * pair + 1) * n + r);
        let s = if conj { 0.5 * I } else { -0.5 * I };
        &re.scale(0.5) + &im.scale(s)
    }

    fn d_range(&self, frames: std::ops::Range<usize>) -> Self {
        let mut out = Self::zero(self.n);
        for (m, p) in &self.terms {
            for k in frames.clone() {
                if let Some(sign) = wedge_sign(1 << k, *m) {
                    out.add_term((1 << k) | m, self.frame_derivative(p, k).scale(sign));
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        self.d_range(0..4 * self.n)
    }

    /// `∂`, the `(1,0)` part of `d`.
    pub fn del(&self) -> Self {
        self.d_range(0..2 * self.n)
    }

    /// `∂̄`, the `(0,1)` part of `d`.
    pub fn del_bar(&self) -> Self {
        self.d_range(2 * self.n..4 * self.n)
    }

    /// `(∂, ∂̄)`.
    pub fn d_split(&self) -> (Self, Self) {
        (self.del(), self.del_bar())
    }

    fn map_frame(&self, image: impl Fn(usize) -> (usize, f64), conj_coeffs: bool) -> Self {
        let mut out = Self::zero(self.n);
        for (m, p) in &self.terms {
            let mut list = Vec::new();
            let mut factor = 1.0;
            for k in indices(*m) {
                let (k2, c) = image(k);
                list.push(k2);
                factor *= c;
            }
            let (mask, sign) = sort_indices(&list).expect("frame maps are bijective");
            let coeff = if conj_coeffs { p.conj() } else { p.clone() };
            out.add_term(mask, coeff.scale(sign * factor));
        }
        out
    }

    /// Pullback by `J₀` on covectors, `ξ ↦ ξ∘J₀`.
    pub fn j_act(&self) -> Self {
        let n = self.n;
        self.map_frame(
            |k| match k / n {
                0 => (3 * n + k, -1.0),
                1 => (k + n, 1.0),
                2 => (k - n, -1.0),
                _ => (k - 3 * n, 1.0),
            },
            false,
        )
    }

    /// `J⁻¹ = (−1)^k·J` on `k`-forms.
    pub fn j_inv(&self) -> Self {
        let j = self.j_act();
        let mut out = Self::zero(self.n);
        for (m, p) in &j.terms {
            let sign = if m.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(*m, p.scale(sign));
        }
        out
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        let n = self.n;
        self.map_frame(|k| ((k + 2 * n) % (4 * n), 1.0), true)
    }

    /// `∂_J = J⁻¹ ∂̄ J`.
    pub fn del_j(&self) -> Self {
        self.j_act().del_bar().j_inv()
    }

    /// `∂∂_J u` for a function `u`.
    pub fn dd_j(n: usize, u: &Poly) -> Self {
        Self::function(n, u.clone()).del_j().del()
    }

    /// Coefficients evaluated at `x`, as a constant form.
    pub fn at(&self, x: &[f64]) -> Self {
        let mut out = Self::zero(self.n);
        for (m, p) in &self.terms {
            out.add_term(*m, Poly::constant(p.eval(x)));
        }
        out
    }

    /// Coefficient at `x` of `Θ = θ_0 ∧ θ_n ∧ θ_1 ∧ θ_{n+1} ∧ … ∧ θ_{2n−1}`,
    /// the `(2n,0)`-form ordered one quaternionic coordinate at a time.
    pub fn top_coefficient(&self, x: &[f64]) -> Complex64 {
        let n = self.n;
        let order: Vec<usize> = (0..n).flat_map(|r| [r, n + r]).collect();
        let (top, sign) = sort_indices(&order).expect("distinct indices");
        self.terms.get(&top).map(|p| p.eval(x) * sign).unwrap_or_default()
    }

    /// Matrix `O` of a 2-form at `x` acting on real vectors, `ω(V, W) = Vᵀ O W`.
    pub fn two_form_matrix(&self, x: &[f64]) -> DMatrix<Complex64> {
        let n = self.n;
        let d = 4 * n;
        let mut o = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for (m, p) in &self.terms {
            let idx = indices(*m);
            if idx.len() != 2 {
                continue;
            }
            let c = p.eval(x);
            let (u, v) = (Self::frame_row(n, idx[0]), Self::frame_row(n, idx[1]));
            for a in 0..d {
                for b in 0..d {
                    o[(a, b)] += c * (u[a] * v[b] - v[a] * u[b]);
                }
            }
        }
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_is_graded_anticommutative() {
        let a = PolyForm::dx(2, 0);
        let b = PolyForm::dx(2, 5);
        assert_eq!(a.wedge(&b), b.wedge(&a).scale(-1.0));
        assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn dx_matches_frame_rows() {
        for n in 1..=2 {
            for a in 0..4 * n {
                let f = PolyForm::dx(n, a);
                let mut row = vec![Complex64::new(0.0, 0.0); 4 * n];
                for (m, p) in f.terms() {
                    let k = m.trailing_zeros() as usize;
                    let c = p.eval(&[0.0; 8]);
                    for (r, v) in row.iter_mut().zip(PolyForm::frame_row(n, k)) {
                        *r += c * v;
                    }
                }
                for (b, v) in row.iter().enumerate() {
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((v - Complex64::new(want, 0.0)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn holomorphic_coordinate() {
        let z = &Poly::var(0) + &Poly::var(1).scale(I);
        let f = PolyForm::function(1, z);
        assert!(f.del_bar().is_zero());
        assert_eq!(f.del(), PolyForm::frame(1, 0));
    }

    #[test]
    fn j_squared_is_sign() {
        let n = 2;
        let a = PolyForm::dx(n, 1).wedge(&PolyForm::frame(n, 2)).wedge(&PolyForm::frame(n, 7));
        assert_eq!(a.j_act().j_act(), a.scale(-1.0));
        let b = PolyForm::frame(n, 0).wedge(&PolyForm::frame(n, 1));
        assert_eq!(b.j_act().j_act(), b);
        assert_eq!(b.j_act().bidegrees(), vec![(0, 2)]);
    }
}
