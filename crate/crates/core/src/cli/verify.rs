//! Seeded identity suites behind `qma verify`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forms::{
    matrix_to_form, metric_from_form, random_hyperhermitian, random_positive, verify_delta_logdet, verify_formule,
    verify_lucio, Poly, PolyHyperhermitian, MAX_VARS,
};
use crate::grid::{partial, quat_hessian, real_hessian, DerivativeMode, GridShape, PeriodicScalarField};
use crate::quat::{
    hh_inverse, iota, moore_det, p_project, re_trace_product, symmetric_eigenvalues, HyperhermitianMatrix,
    QuatMatrix, Quaternion,
};

/// Worst residual of one identity over all sampled cases.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// First failing case, if any.
    pub failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, cases: 0, max_residual: 0.0, tolerance, failure: None }
    }

    fn push(&mut self, residual: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !(residual <= self.max_residual) {
            self.max_residual = residual;
        }
        if !(residual <= self.tolerance) && self.failure.is_none() {
            self.failure = Some(format!("{} (residual {residual:e})", describe()));
        }
    }

    fn fail(&mut self, message: String) {
        self.cases += 1;
        self.max_residual = f64::INFINITY;
        if self.failure.is_none() {
            self.failure = Some(message);
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Case counts for the randomized suites.
#[derive(Clone, Copy, Debug)]
pub struct SuiteSizes {
    pub algebra_per_n: usize,
    pub formule: usize,
    pub lucio: usize,
    pub jets: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self { algebra_per_n: 1000, formule: 100, lucio: 100, jets: 20 }
    }
}

fn rng_for(seed: u64, suite: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_quat_matrix(rng: &mut impl Rng, n: usize) -> QuatMatrix {
    let entries = (0..n * n).map(|_| Quaternion::from_components([(); 4].map(|_| rng.gen_range(-1.0..1.0)))).collect();
    QuatMatrix::from_entries(n, entries)
}

fn random_symmetric(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min)
}

/// Moore determinant, ι homomorphism, p, inverse and trace pairing for `n ∈ {1, 2, 3}`.
pub fn algebra_suites(seed: u64, per_n: usize) -> Vec<SuiteResult> {
    let mut rng = rng_for(seed, 1);
    let mut det = SuiteResult::new("moore_det(U)^4 = det iota(U)", 1e-9);
    let mut hom = SuiteResult::new("iota(MN) = iota(M) iota(N)", 1e-12);
    let mut idem = SuiteResult::new("p(p(M)) = p(M)", 1e-14);
    let mut pos = SuiteResult::new("p preserves positivity", 1e-14);
    let mut inv = SuiteResult::new("iota(U hh_inverse(U)) = Id", 1e-10);
    let mut trace = SuiteResult::new("Re tr(AB) = tr(iota(A) iota(B))/4", 1e-12);
    for n in 1..=3 {
        let d = 4 * n;
        for k in 0..per_n {
            let label = || format!("n={n} case {k}");
            let u = random_hyperhermitian(&mut rng, n, 1.0);
            let real = u.iota().determinant();
            match moore_det(&u) {
                Ok(m) => det.push((m.powi(4) - real).abs() / (1.0 + real.abs()), label),
                Err(e) => det.fail(format!("{}: {e}", label())),
            }

            let a = random_quat_matrix(&mut rng, n);
            let b = random_quat_matrix(&mut rng, n);
            let (ia, ib) = (iota(&a), iota(&b));
            hom.push((iota(&a.mul(&b)) - &ia * &ib).norm() / (ia.norm() * ib.norm()), label);

            let m = random_symmetric(&mut rng, d);
            let pm = p_project(&m);
            idem.push((p_project(&pm) - &pm).amax(), label);

            let spd = &m * &m + DMatrix::identity(d, d) * 1e-3;
            let lost = (min_eigenvalue(&spd) - min_eigenvalue(&p_project(&spd))).max(0.0);
            pos.push(lost / (1.0 + spd.amax()), label);

            let g = random_positive(&mut rng, n, 0.5);
            match hh_inverse(&g) {
                Ok(gi) => inv.push((iota(&g.as_quat().mul(gi.as_quat())) - DMatrix::identity(d, d)).amax(), label),
                Err(e) => inv.fail(format!("{}: {e}", label())),
            }

            let x = random_hyperhermitian(&mut rng, n, 1.0);
            let y = random_hyperhermitian(&mut rng, n, 1.0);
            trace.push((re_trace_product(&x, &y) - (x.iota() * y.iota()).trace() / 4.0).abs(), label);
        }
    }
    vec![det, hom, idem, pos, inv, trace]
}

/// The wedge-power identities for random `(G, H)`, alternating `n = 1, 2`.
pub fn formule_suites(seed: u64, cases: usize, kappa: f64) -> Vec<SuiteResult> {
    let mut rng = rng_for(seed, 2);
    let mut ratio = SuiteResult::new("formule: wedge power ratio", 1e-9);
    let mut linear = SuiteResult::new("formule: linearized trace", 1e-9);
    let mut round = SuiteResult::new("metric_from_form(matrix_to_form(G)) = G", 1e-10);
    for k in 0..cases {
        let n = 1 + k % 2;
        let label = || format!("n={n} case {k}");
        let g = random_positive(&mut rng, n, 0.5);
        let h = random_hyperhermitian(&mut rng, n, 0.5);
        match verify_formule(&g, &h, kappa) {
            Ok((r1, r2)) => {
                ratio.push(r1, label);
                linear.push(r2, label);
            }
            Err(e) => {
                ratio.fail(format!("{}: {e}", label()));
                linear.fail(format!("{}: {e}", label()));
            }
        }
        match metric_from_form(&matrix_to_form(&g, kappa), &[0.0; MAX_VARS]) {
            Ok(back) => round.push((back.iota() - g.iota()).amax(), label),
            Err(e) => round.fail(format!("{}: {e}", label())),
        }
    }
    vec![ratio, linear, round]
}

fn random_covector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..2 * n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// The `(1,0)`-covector pairing identity for random `(G, α, β)`.
pub fn lucio_suite(seed: u64, cases: usize, kappa: f64) -> SuiteResult {
    let mut rng = rng_for(seed, 3);
    let mut s = SuiteResult::new("alpha ^ J(conj beta) ^ Omega^(n-1) pairing", 1e-10);
    for k in 0..cases {
        let n = 1 + k % 2;
        let g = random_positive(&mut rng, n, 0.5);
        let alpha = random_covector(&mut rng, n);
        let beta = random_covector(&mut rng, n);
        match verify_lucio(&g, &alpha, &beta, kappa) {
            Ok(r) => s.push(r, || format!("n={n} case {k}")),
            Err(e) => s.fail(format!("n={n} case {k}: {e}")),
        }
    }
    s
}

/// Random polynomial without constant term: linear plus quadratic, coefficients of size `scale`.
fn random_jet(rng: &mut impl Rng, d: usize, scale: f64) -> Poly {
    let mut p = Poly::zero();
    for a in 0..d {
        p = &p + &Poly::var(a).scale(scale * rng.gen_range(-1.0..1.0));
        for b in a..d {
            let mut e = [0u8; MAX_VARS];
            e[a] += 1;
            e[b] += 1;
            p = &p + &Poly::monomial(e, scale * rng.gen_range(-1.0..1.0));
        }
    }
    p
}

/// Polynomial matrix diagonal and positive at the origin.
pub fn random_poly_hyperhermitian(rng: &mut impl Rng, n: usize) -> PolyHyperhermitian {
    let d = 4 * n;
    let diag = (0..n).map(|_| &Poly::constant(rng.gen_range(1.0..2.0)) + &random_jet(rng, d, 0.3)).collect();
    let upper = (0..n * (n - 1) / 2).map(|_| [(); 4].map(|_| random_jet(rng, d, 0.3))).collect();
    PolyHyperhermitian { diag, upper }
}

/// The `Δ log det` formula: constant matrices and random quadratic jets.
pub fn delta_logdet_suites(seed: u64, jets: usize, kappa: f64) -> Vec<SuiteResult> {
    let mut rng = rng_for(seed, 4);
    let origin = [0.0; MAX_VARS];
    let mut constant = SuiteResult::new("delta log det: constant U", 0.0);
    for n in 1..=2 {
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let u = PolyHyperhermitian::constant(&HyperhermitianMatrix::diagonal(&diag));
        match verify_delta_logdet(&u, &origin, kappa) {
            Ok(r) => constant.push(r.symbolic.max(r.lhs_symbolic.abs()), || format!("n={n}")),
            Err(e) => constant.fail(format!("n={n}: {e}")),
        }
    }
    let mut symbolic = SuiteResult::new("delta log det: symbolic jets", 1e-8);
    let mut fd = SuiteResult::new("delta log det: finite-difference jets", 1e-6);
    for k in 0..jets {
        let n = 1 + k % 2;
        let u = random_poly_hyperhermitian(&mut rng, n);
        match verify_delta_logdet(&u, &origin, kappa) {
            Ok(r) => {
                symbolic.push(r.symbolic, || format!("n={n} jet {k}"));
                fd.push(r.fd, || format!("n={n} jet {k}"));
            }
            Err(e) => {
                symbolic.fail(format!("n={n} jet {k}: {e}"));
                fd.fail(format!("n={n} jet {k}: {e}"));
            }
        }
    }
    vec![constant, symbolic, fd]
}

/// Smooth periodic test field: a few cosines with seeded wave vectors and phases.
pub fn analytic_field(rng: &mut impl Rng, shape: &GridShape) -> PeriodicScalarField {
    let d = shape.dims();
    let modes: Vec<(Vec<f64>, f64, f64)> = (0..3)
        .map(|_| {
            let wave = (0..d).map(|_| rng.gen_range(-1i32..=1) as f64).collect();
            (wave, rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(-1.0..1.0))
        })
        .collect();
    PeriodicScalarField::from_fn(shape, |x| {
        modes
            .iter()
            .map(|(w, phase, amp)| {
                let t: f64 = w.iter().zip(x).map(|(k, xi)| k * xi).sum();
                amp * (std::f64::consts::TAU * t + phase).cos()
            })
            .sum()
    })
}

/// `ι(Hess_H f) = 4·project(Hess_R f)` on five fields per `n`, and the
/// scalar reduction at `n = 1`. `project` is normally [`p_project`].
pub fn hessian_suites(seed: u64, project: &dyn Fn(&DMatrix<f64>) -> DMatrix<f64>) -> Vec<SuiteResult> {
    let mut rng = rng_for(seed, 5);
    let mut consistency = SuiteResult::new("iota(Hess_H f) = 4 p(Hess_R f)", 1e-10);
    let mut scalar = SuiteResult::new("n=1: Hess_H f = sum of pure second derivatives", 1e-12);
    let mode = DerivativeMode::Fd4;
    for (n, points) in [(1, 8), (2, 5)] {
        let shape = GridShape::new(n, points).expect("valid grid");
        for k in 0..5 {
            let f = analytic_field(&mut rng, &shape);
            let hq = quat_hessian(&f, mode).expect("grid large enough");
            let hr = real_hessian(&f, mode).expect("grid large enough");
            let mut worst: f64 = 0.0;
            for index in 0..shape.len() {
                let lhs = hq.at(index).iota();
                let rhs = project(&hr.at(index)) * 4.0;
                worst = worst.max((lhs - rhs).amax());
            }
            consistency.push(worst, || format!("n={n} field {k}"));
            if n == 1 {
                let mut lap = vec![0.0; shape.len()];
                for a in 0..4 {
                    let second = partial(&f, a, 2, mode).expect("valid axis");
                    for (l, v) in lap.iter_mut().zip(second.values()) {
                        *l += v;
                    }
                }
                let worst =
                    (0..shape.len()).map(|i| (hq.packed(i)[0] - lap[i]).abs()).fold(0.0, f64::max);
                scalar.push(worst, || format!("field {k}"));
            }
        }
    }
    vec![consistency, scalar]
}

/// Every suite, in display order.
pub fn all_suites(seed: u64, kappa: f64, sizes: SuiteSizes) -> Vec<SuiteResult> {
    let mut out = algebra_suites(seed, sizes.algebra_per_n);
    out.extend(formule_suites(seed, sizes.formule, kappa));
    out.push(lucio_suite(seed, sizes.lucio, kappa));
    out.extend(delta_logdet_suites(seed, sizes.jets, kappa));
    out.extend(hessian_suites(seed, &p_project));
    out
}

/// Fixed-width table, one line per identity.
pub fn render_table(results: &[SuiteResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(8).max(8);
    let mut out = format!("{:<width$}  {:>6}  {:>12}  {:>9}  status\n", "identity", "cases", "max residual", "tolerance");
    for r in results {
        out.push_str(&format!(
            "{:<width$}  {:>6}  {:>12.3e}  {:>9.1e}  {}\n",
            r.name,
            r.cases,
            r.max_residual,
            r.tolerance,
            if r.passed() { "ok" } else { "FAIL" }
        ));
    }
    for r in results.iter().filter(|r| !r.passed()) {
        out.push_str(&format!("failed: {}: {}\n", r.name, r.failure.as_deref().unwrap_or("")));
    }
    out
}
