//! Complex-coefficient polynomials in the real coordinates `x_0 … x_{4n−1}`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Exponent vector; at most 8 real variables (`n ≤ 2`).
pub type Monomial = [u8; 8];

pub const MAX_VARS: usize = 8;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Monomial, Complex64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::monomial([0; MAX_VARS], c)
    }

    pub fn monomial(exp: Monomial, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// The coordinate `x_a`.
    pub fn var(a: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[a] = 1;
        Self::monomial(e, 1.0)
    }

    /// `½ xᵀ S x` for a symmetric `S`.
    pub fn quadratic(s: &DMatrix<f64>) -> Self {
        let d = s.nrows();
        let mut p = Self::zero();
        for a in 0..d {
            for b in a..d {
                let mut e = [0; MAX_VARS];
                e[a] += 1;
                e[b] += 1;
                let c = if a == b { 0.5 * s[(a, a)] } else { 0.5 * (s[(a, b)] + s[(b, a)]) };
                p.add_term(e, Complex64::new(c, 0.0));
            }
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&k| k as usize).sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Monomial, c: Complex64) {
        let slot = self.terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, v)| (*e, v.conj())).collect() }
    }

    pub fn real_part(&self) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, Complex64::new(v.re, 0.0));
        }
        out
    }

    /// `∂/∂x_a`.
    pub fn derivative(&self, a: usize) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            if e[a] > 0 {
                let mut f = *e;
                f[a] -= 1;
                out.add_term(f, v * e[a] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, v)| {
                let m: f64 = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(a, &k)| x[a].powi(k as i32)).product();
                v * m
            })
            .sum()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self { terms: self.terms.iter().filter(|(_, v)| v.norm() > tol).map(|(e, v)| (*e, *v)).collect() }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, *v);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, -v);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, va) in &self.terms {
            for (eb, vb) in &rhs.terms {
                let mut e = *ea;
                for (k, b) in e.iter_mut().zip(eb) {
                    *k += b;
                }
                out.add_term(e, va * vb);
            }
        }
        out
    }
}
