//! Monitors and functionals along the flow.
//!
//! All integrals use the flat volume normalized to 1. The evolving volume
//! density is `det(Id + κ·Hess_H φ)`.

mod csv;

pub use self::csv::{parse_csv, render_csv, render_row, write_csv, CSV_HEADER};

use crate::flow::{Evaluation, FlowState};
use crate::grid::{gradient, mean, pairwise_sum, weighted_integral, DerivativeMode, PeriodicScalarField};
use crate::quat::{small, Quaternion, IOTA_BLOCKS};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    pub max_phi_t: f64,
    pub min_phi_t: f64,
    pub osc_phi: f64,
    pub max_lap: f64,
    pub max_q: f64,
    pub f: f64,
    pub d: f64,
    pub f_fd: f64,
    pub m: f64,
    pub residual: f64,
    pub b: f64,
}

/// Constants shared by all records of a run.
#[derive(Clone, Copy, Debug)]
pub struct DiagnosticsContext {
    pub kappa: f64,
    pub c_grad: f64,
    pub mode: DerivativeMode,
    /// `1/mean(e^F)`.
    pub b: f64,
}

pub fn volume_density(eval: &Evaluation) -> &PeriodicScalarField {
    &eval.density
}

/// `∫ φ_t dV_φ`.
pub fn energy_f(eval: &Evaluation) -> f64 {
    weighted_integral(&eval.rhs, &eval.density)
}

/// `vᵀ ι(W) v` for a packed hyperhermitian `W`.
fn iota_quadratic_form(n: usize, diag: &[f64], upper: &[Quaternion], v: &[f64]) -> f64 {
    let entry = |r: usize, s: usize| -> Quaternion {
        match r.cmp(&s) {
            std::cmp::Ordering::Equal => Quaternion::real(diag[r]),
            std::cmp::Ordering::Less => upper[0],
            std::cmp::Ordering::Greater => upper[0].conj(),
        }
    };
    let mut sum = 0.0;
    for r in 0..n {
        for s in 0..n {
            let q = entry(r, s).components();
            for (bi, row) in IOTA_BLOCKS.iter().enumerate() {
                for (bj, &(c, sign)) in row.iter().enumerate() {
                    sum += v[bi * n + r] * sign * q[c] * v[bj * n + s];
                }
            }
        }
    }
    sum
}

/// `½·∫ c_grad·∇φ_tᵀ ι(G_φ)⁻¹ ∇φ_t dV_φ` with `G_φ = Id + κ·Hess_H φ`.
pub fn dissipation_d(eval: &Evaluation, kappa: f64, c_grad: f64, mode: DerivativeMode) -> f64 {
    let shape = eval.rhs.shape();
    let n = shape.n();
    let grad = gradient(&eval.rhs, mode).expect("grid already validated by the flow");
    let integrand = shape.map_points(1, |index, _, out| {
        let p = eval.hessian.packed(index);
        let mut diag = [0.0; 2];
        for (d, &h) in diag.iter_mut().zip(&p[..n]) {
            *d = 1.0 + kappa * h;
        }
        let mut upper = [Quaternion::ZERO; 1];
        if n == 2 {
            upper[0] = Quaternion::new(p[2], p[3], p[4], p[5]).scale(kappa);
        }
        let (inv_diag, inv_upper) = small::inverse(&diag[..n], &upper[..n - 1]);
        let mut v = [0.0; 8];
        for (a, g) in grad.iter().enumerate() {
            v[a] = g.values()[index];
        }
        let q = iota_quadratic_form(n, &inv_diag, &inv_upper, &v[..4 * n]);
        out[0] = 0.5 * c_grad * q * eval.density.values()[index];
    });
    pairwise_sum(&integrand) / integrand.len() as f64
}

/// `∫ log(Ω_φⁿ/Ω₀ⁿ) dV_φ`; the `h`-term vanishes on the flat torus.
pub fn mabuchi_m(eval: &Evaluation) -> f64 {
    weighted_integral(&eval.density.map(f64::ln), &eval.density)
}

/// `1/mean(e^F)`.
pub fn compute_b(forcing: &PeriodicScalarField) -> f64 {
    1.0 / mean(&forcing.map(f64::exp))
}

/// `max |det(Id + κ·Hess_H φ) − b·e^F|`.
pub fn elliptic_residual(eval: &Evaluation, forcing: &PeriodicScalarField, b: f64) -> f64 {
    eval.density.zip_map(forcing, |d, f| (d - b * f.exp()).abs()).max()
}

/// Pointwise `|det − e^{F+φ_t}|`, the flow identity defect.
pub fn flow_identity_defect(eval: &Evaluation, forcing: &PeriodicScalarField) -> f64 {
    let e = forcing.zip_map(&eval.rhs, |f, r| (f + r).exp());
    eval.density.max_abs_diff(&e)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monitors {
    pub max_phi_t: f64,
    pub min_phi_t: f64,
    pub osc_phi: f64,
    pub max_lap: f64,
    pub max_q: f64,
}

/// Bounds on `φ_t`, `osc φ`, `Δ_ĝφ` and `Q = 2√((κ/n)·tr(Id + κ·Hess_H φ)) − φ`.
pub fn lemma_monitors(state: &FlowState, eval: &Evaluation, kappa: f64) -> Monitors {
    let shape = state.phi.shape();
    let n = shape.n();
    let scale = kappa / n as f64;
    let (mut max_lap, mut max_q) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (index, &phi) in state.phi.values().iter().enumerate() {
        let p = eval.hessian.packed(index);
        let trace_h: f64 = p[..n].iter().sum();
        max_lap = max_lap.max(scale * trace_h);
        let trace_u = n as f64 + kappa * trace_h;
        max_q = max_q.max(2.0 * (scale * trace_u).sqrt() - phi);
    }
    Monitors {
        max_phi_t: eval.rhs.max(),
        min_phi_t: eval.rhs.min(),
        osc_phi: state.phi.oscillation(),
        max_lap,
        max_q,
    }
}

/// One record with `f_fd` left at zero; see [`fill_f_fd`].
pub fn record(state: &FlowState, eval: &Evaluation, ctx: &DiagnosticsContext) -> DiagnosticsRecord {
    let mon = lemma_monitors(state, eval, ctx.kappa);
    DiagnosticsRecord {
        step: state.step,
        t: state.t,
        dt: state.dt,
        max_phi_t: mon.max_phi_t,
        min_phi_t: mon.min_phi_t,
        osc_phi: mon.osc_phi,
        max_lap: mon.max_lap,
        max_q: mon.max_q,
        f: energy_f(eval),
        d: dissipation_d(eval, ctx.kappa, ctx.c_grad, ctx.mode),
        f_fd: 0.0,
        m: mabuchi_m(eval),
        residual: elliptic_residual(eval, &state.forcing, ctx.b),
        b: ctx.b,
    }
}

/// Second-order finite-difference estimate of `f′` over the record times:
/// centred (non-uniform) in the interior, one-sided at the ends.
pub fn fill_f_fd(records: &mut [DiagnosticsRecord]) {
    let len = records.len();
    if len < 2 {
        for r in records.iter_mut() {
            r.f_fd = 0.0;
        }
        return;
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let f: Vec<f64> = records.iter().map(|r| r.f).collect();
    if len == 2 {
        let s = (f[1] - f[0]) / (t[1] - t[0]);
        records[0].f_fd = s;
        records[1].f_fd = s;
        return;
    }
    for j in 0..len {
        let (i0, i1, i2) = if j == 0 {
            (0, 1, 2)
        } else if j == len - 1 {
            (len - 3, len - 2, len - 1)
        } else {
            (j - 1, j, j + 1)
        };
        let h1 = t[i1] - t[i0];
        let h2 = t[i2] - t[i1];
        let (w0, w1, w2) = if j == 0 {
            (-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2)))
        } else if j == len - 1 {
            (h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (h1 + 2.0 * h2) / (h2 * (h1 + h2)))
        } else {
            (-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2)))
        };
        records[j].f_fd = w0 * f[i0] + w1 * f[i1] + w2 * f[i2];
    }
}

/// Least-squares decay rate `C ≥ 0` with `f″ ≈ −C·f′` over the last `tail`
/// records, from three-point differences.
pub fn fit_f_second_derivative(records: &[DiagnosticsRecord], tail: usize) -> Option<f64> {
    let start = records.len().saturating_sub(tail);
    let r = &records[start..];
    if r.len() < 3 {
        return None;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for w in r.windows(3) {
        let fp = (w[2].f - w[0].f) / (w[2].t - w[0].t);
        let fpp = 2.0
            * ((w[2].f - w[1].f) / (w[2].t - w[1].t) - (w[1].f - w[0].f) / (w[1].t - w[0].t))
            / (w[2].t - w[0].t);
        num -= fp * fpp;
        den += fp * fp;
    }
    (den > 0.0).then(|| (num / den).max(0.0))
}
