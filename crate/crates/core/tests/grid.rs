mod common;

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use proptest::prelude::*;
use qma_flow::grid::io::{read_snapshot, sidecar_path, write_snapshot, SnapshotSidecar};
use qma_flow::grid::*;
use qma_flow::quat::{re_trace_product, HyperhermitianMatrix};

use common::{bessel_i0, fd4_first_symbol, fd4_second_symbol};

fn sin_field(shape: &GridShape, axis: usize) -> PeriodicScalarField {
    PeriodicScalarField::from_fn(shape, |x| (TAU * x[axis]).sin())
}

#[test]
fn constants_are_annihilated() {
    let shape = GridShape::new(1, 8).unwrap();
    let c = PeriodicScalarField::constant(&shape, 3.7);
    for mode in [DerivativeMode::Fd4, DerivativeMode::Spectral] {
        for a in 0..4 {
            for order in 1..=2 {
                assert!(partial(&c, a, order, mode).unwrap().max_abs() <= 1e-13);
            }
        }
        assert!(real_hessian(&c, mode).unwrap().at(17).amax() <= 1e-13);
        assert!(quat_hessian(&c, mode).unwrap().data().iter().all(|v| v.abs() <= 1e-13));
    }
}

#[test]
fn fd4_first_derivative_of_a_sine() {
    let points = 16;
    let shape = GridShape::new(1, points).unwrap();
    let d = partial(&sin_field(&shape, 0), 0, 1, DerivativeMode::Fd4).unwrap();
    let h = 1.0 / points as f64;
    let bound = TAU.powi(5) * h.powi(4) / 30.0;
    let symbol = fd4_first_symbol(1.0, points);
    for (i, &v) in d.values().iter().enumerate() {
        let x0 = shape.position(i)[0];
        assert!((v - TAU * (TAU * x0).cos()).abs() <= bound);
        assert!((v - symbol * (TAU * x0).cos()).abs() <= 1e-12);
    }
}

#[test]
fn spectral_is_exact_on_band_limited_data() {
    let points = 8;
    let shape = GridShape::new(1, points).unwrap();
    let f = PeriodicScalarField::from_fn(&shape, |x| (TAU * 3.0 * x[1]).sin() + 0.5 * (TAU * 2.0 * x[1]).cos());
    let d1 = partial(&f, 1, 1, DerivativeMode::Spectral).unwrap();
    let d2 = partial(&f, 1, 2, DerivativeMode::Spectral).unwrap();
    for i in 0..shape.len() {
        let y = shape.position(i)[1];
        let e1 = TAU * 3.0 * (TAU * 3.0 * y).cos() - 0.5 * TAU * 2.0 * (TAU * 2.0 * y).sin();
        let e2 = -(TAU * 3.0).powi(2) * (TAU * 3.0 * y).sin() - 0.5 * (TAU * 2.0).powi(2) * (TAU * 2.0 * y).cos();
        assert!((d1.values()[i] - e1).abs() <= 1e-12 * (1.0 + e1.abs()));
        assert!((d2.values()[i] - e2).abs() <= 1e-12 * (1.0 + e2.abs()));
    }
}

#[test]
fn errors_for_bad_requests() {
    let small = GridShape::new(1, 4).unwrap();
    let f = PeriodicScalarField::zeros(&small);
    assert!(matches!(partial(&f, 0, 1, DerivativeMode::Fd4), Err(GridError::GridTooSmall { .. })));
    assert!(partial(&f, 0, 1, DerivativeMode::Spectral).is_ok());
    let shape = GridShape::new(1, 8).unwrap();
    let g = PeriodicScalarField::zeros(&shape);
    assert!(matches!(partial(&g, 4, 1, DerivativeMode::Fd4), Err(GridError::AxisOutOfRange { .. })));
    assert!(matches!(partial(&g, 0, 3, DerivativeMode::Fd4), Err(GridError::InvalidOrder(3))));
}

#[test]
fn mixed_entry_of_a_sine_product() {
    let points = 16;
    let shape = GridShape::new(1, points).unwrap();
    let f = PeriodicScalarField::from_fn(&shape, |x| (TAU * x[0]).sin() * (TAU * x[1]).sin());
    let hr = real_hessian(&f, DerivativeMode::Fd4).unwrap();
    let h = 1.0 / points as f64;
    let bound = 2.0 * TAU * TAU.powi(5) * h.powi(4) / 30.0;
    let s = fd4_first_symbol(1.0, points);
    for i in 0..shape.len() {
        let x = shape.position(i);
        let c = (TAU * x[0]).cos() * (TAU * x[1]).cos();
        let m = hr.at(i);
        assert_eq!(m[(0, 1)], m[(1, 0)]);
        assert!((m[(0, 1)] - 4.0 * PI * PI * c).abs() <= bound);
        assert!((m[(0, 1)] - s * s * c).abs() <= 1e-10);
    }
}

#[test]
fn hessian_of_the_standard_quadratic_is_eight() {
    let h = qma_flow::forms::quat_hessian_of_quadratic(&(DMatrix::identity(4, 4) * 2.0));
    assert!((h.get(0, 0).w - 8.0).abs() < 1e-14);
}

#[test]
fn affine_mode_at_an_inflection_has_zero_hessian() {
    // sin(2πx⁰) has vanishing second derivative where x⁰ = 0
    let shape = GridShape::new(1, 8).unwrap();
    let h = quat_hessian(&sin_field(&shape, 0), DerivativeMode::Fd4).unwrap();
    assert!(h.packed(0)[0].abs() <= 1e-12);
}

/// Off-diagonal entry of `Hess_H` for `sin(2πx¹₀)·sin(2πx²₀)` at `n = 2`,
/// compared with `ι⁻¹(4p(·))` of the exact discrete Hessian.
#[test]
fn quaternionic_hessian_off_diagonal_at_n2() {
    let points = 5;
    let shape = GridShape::new(2, points).unwrap();
    let (a, b) = (shape.axis(0, 0), shape.axis(1, 0));
    let f = PeriodicScalarField::from_fn(&shape, |x| (TAU * x[a]).sin() * (TAU * x[b]).sin());
    let hq = quat_hessian(&f, DerivativeMode::Fd4).unwrap();
    let s1 = fd4_first_symbol(1.0, points);
    let s2 = fd4_second_symbol(1.0, points);
    for i in (0..shape.len()).step_by(97) {
        let x = shape.position(i);
        let (sa, ca) = (TAU * x[a]).sin_cos();
        let (sb, cb) = (TAU * x[b]).sin_cos();
        let mut real = DMatrix::zeros(8, 8);
        real[(a, a)] = -s2 * sa * sb;
        real[(b, b)] = -s2 * sa * sb;
        real[(a, b)] = s1 * s1 * ca * cb;
        real[(b, a)] = s1 * s1 * ca * cb;
        let want = HyperhermitianMatrix::symmetrized(&qma_flow::quat::iota_inverse(&(qma_flow::quat::p_project(&real) * 4.0)));
        let got = hq.at(i);
        for r in 0..2 {
            for s in 0..2 {
                assert!(got.get(r, s).max_abs_diff(&want.get(r, s)) <= 1e-10, "{i} {r}{s}");
            }
        }
        assert!((got.get(0, 1).w - s1 * s1 * ca * cb).abs() <= 1e-10);
    }
}

#[test]
fn laplacian_of_a_sine() {
    let points = 16;
    let kappa = 1.3;
    let shape = GridShape::new(1, points).unwrap();
    let f = sin_field(&shape, 0);
    let lap = quat_laplacian(&f, kappa, DerivativeMode::Fd4).unwrap();
    let hq = quat_hessian(&f, DerivativeMode::Fd4).unwrap();
    let h = 1.0 / points as f64;
    let bound = kappa * TAU.powi(6) * h.powi(4) / 90.0;
    for i in 0..shape.len() {
        let x0 = shape.position(i)[0];
        let exact = -4.0 * PI * PI * kappa * (TAU * x0).sin();
        assert!((lap.values()[i] - exact).abs() <= bound);
        let via_trace = kappa * re_trace_product(&HyperhermitianMatrix::identity(1), &hq.at(i));
        assert!((lap.values()[i] - via_trace).abs() <= 1e-12);
    }
}

#[test]
fn means_and_the_bessel_oracle() {
    let shape = GridShape::new(1, 16).unwrap();
    assert!((mean(&PeriodicScalarField::constant(&shape, 2.5)) - 2.5).abs() < 1e-15);
    assert!(mean(&sin_field(&shape, 0)).abs() <= 1e-13);
    let ef = PeriodicScalarField::from_fn(&shape, |x| (0.5 * (TAU * x[0]).cos()).exp());
    assert!((mean(&ef) - bessel_i0(0.5)).abs() <= 1e-12);
    assert!((bessel_i0(0.5) - 1.0635).abs() < 1e-4);
    let w = PeriodicScalarField::constant(&shape, 2.0);
    assert!((weighted_integral(&ef, &w) - 2.0 * bessel_i0(0.5)).abs() <= 1e-12);
}

#[test]
fn reductions_do_not_depend_on_the_thread_count() {
    let shape = GridShape::new(1, 16).unwrap();
    let f = PeriodicScalarField::from_fn(&shape, |x| (x[0] * 13.0 + x[1] * 7.0 + x[2] * x[3]).sin() * 1e3);
    let sums: Vec<u64> = [1, 2, 3]
        .iter()
        .map(|&t| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
            pool.install(|| pairwise_sum(f.values()).to_bits())
        })
        .collect();
    assert!(sums.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn snapshot_round_trip_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let shape = GridShape::new(1, 6).unwrap();
    let f = PeriodicScalarField::from_fn(&shape, |x| x[0] - 2.0 * x[3] + 1e-300);
    let raw = dir.path().join("phi.f64");
    write_snapshot(&f, &raw).unwrap();
    assert_eq!(std::fs::metadata(&raw).unwrap().len(), 8 * shape.len() as u64);
    let sidecar: SnapshotSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&raw)).unwrap()).unwrap();
    assert_eq!((sidecar.n, sidecar.points), (1, 6));
    assert_eq!(sidecar.layout, "row-major");
    assert_eq!(sidecar.endianness, "little");
    let text = std::fs::read_to_string(sidecar_path(&raw)).unwrap();
    assert!(text.contains("\"N\""));
    assert_eq!(read_snapshot(&raw).unwrap(), f);
}

fn field_strategy() -> impl Strategy<Value = PeriodicScalarField> {
    prop::collection::vec(-1.0f64..1.0, 6usize.pow(4)).prop_map(|v| {
        PeriodicScalarField::from_values(&GridShape::new(1, 6).unwrap(), v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derivatives_commute_with_translations(f in field_strategy(), shift in prop::array::uniform4(0isize..6), axis in 0usize..4) {
        for mode in [DerivativeMode::Fd4, DerivativeMode::Spectral] {
            for order in 1..=2 {
                let a = partial(&f.shifted(&shift), axis, order, mode).unwrap();
                let b = partial(&f, axis, order, mode).unwrap().shifted(&shift);
                prop_assert!(a.max_abs_diff(&b) <= 1e-13 * 36.0 * 36.0);
            }
        }
    }

    #[test]
    fn derivatives_integrate_to_zero(f in field_strategy(), axis in 0usize..4) {
        for mode in [DerivativeMode::Fd4, DerivativeMode::Spectral] {
            let d = partial(&f, axis, 1, mode).unwrap();
            let one = PeriodicScalarField::constant(f.shape(), 1.0);
            prop_assert!(weighted_integral(&d, &one).abs() <= 1e-12);
        }
    }

    #[test]
    fn n1_hessian_is_the_sum_of_pure_seconds(f in field_strategy()) {
        let hq = quat_hessian(&f, DerivativeMode::Fd4).unwrap();
        let seconds: Vec<_> = (0..4).map(|a| partial(&f, a, 2, DerivativeMode::Fd4).unwrap()).collect();
        for i in 0..f.shape().len() {
            let sum: f64 = seconds.iter().map(|s| s.values()[i]).sum();
            prop_assert!((hq.packed(i)[0] - sum).abs() <= 1e-12 * (1.0 + sum.abs()));
        }
    }

    #[test]
    fn quaternionic_hessian_is_four_p_of_the_real_hessian(f in field_strategy()) {
        let hq = quat_hessian(&f, DerivativeMode::Fd4).unwrap();
        let hr = real_hessian(&f, DerivativeMode::Fd4).unwrap();
        for i in (0..f.shape().len()).step_by(11) {
            let lhs = hq.at(i).iota();
            let rhs = qma_flow::quat::p_project(&hr.at(i)) * 4.0;
            prop_assert!((lhs - rhs).amax() <= 1e-10);
        }
    }

    #[test]
    fn sums_are_reproducible(v in prop::collection::vec(-1e6f64..1e6, 0..5000)) {
        prop_assert_eq!(pairwise_sum(&v).to_bits(), pairwise_sum(&v.clone()).to_bits());
    }
}
