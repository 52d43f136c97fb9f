mod common;

use std::f64::consts::TAU;

use proptest::prelude::*;
use qma_flow::diagnostics::*;
use qma_flow::flow::{forcing_field, run, FMode, FlowConfig, FlowEngine, FlowState, RunOptions};
use qma_flow::grid::{mean, weighted_integral, DerivativeMode, GridShape, PeriodicScalarField};

use common::{bessel_i0, fd4_first_symbol, fd4_second_symbol};

const KAPPA: f64 = 1.0;
const C_GRAD: f64 = 2.0;

fn engine(n: usize, points: usize) -> FlowEngine {
    FlowEngine::new(FlowConfig::new(n, points, KAPPA)).unwrap()
}

fn cosine(engine: &FlowEngine, amplitude: f64) -> PeriodicScalarField {
    let mut wave = vec![0; 4 * engine.config().n];
    wave[0] = 1;
    forcing_field(engine.shape(), &[FMode { wave, amplitude }])
}

#[test]
fn volume_density_of_a_sine() {
    let points = 8;
    let e = engine(1, points);
    let eps = 1e-3;
    let phi = PeriodicScalarField::from_fn(e.shape(), |x| eps * (TAU * x[0]).sin());
    let eval = e.evaluate(&phi, &PeriodicScalarField::zeros(e.shape())).unwrap();
    let s2 = fd4_second_symbol(1.0, points);
    for (i, &d) in volume_density(&eval).values().iter().enumerate() {
        let sin = (TAU * e.shape().position(i)[0]).sin();
        assert!((d - (1.0 - KAPPA * s2 * eps * sin)).abs() <= 1e-13);
    }
    // the flat discrete Laplacian integrates to zero, so the volume stays 1
    assert!((mean(volume_density(&eval)) - 1.0).abs() <= 1e-14);
}

#[test]
fn functionals_at_the_start() {
    let points = 8;
    let e = engine(1, points);
    let forcing = cosine(&e, 0.5);
    let state = FlowState::initial(e.config(), forcing.clone());
    let eval = e.evaluate(&state.phi, &forcing).unwrap();

    assert!((energy_f(&eval) + mean(&forcing)).abs() <= 1e-15);
    assert_eq!(mabuchi_m(&eval), 0.0);

    // φ_t = −F, so D = ½·c_grad·mean(|∂_0 F|²) with the FD4 symbol
    let s1 = fd4_first_symbol(1.0, points);
    let d = dissipation_d(&eval, KAPPA, C_GRAD, DerivativeMode::Fd4);
    assert!((d - 0.5 * C_GRAD * 0.25 * s1 * s1 * 0.5).abs() <= 1e-12);

    let m = lemma_monitors(&state, &eval, KAPPA);
    assert_eq!(m.max_phi_t, -forcing.min());
    assert_eq!(m.min_phi_t, -forcing.max());
    assert_eq!(m.osc_phi, 0.0);
    assert_eq!(m.max_lap, 0.0);
    assert!((m.max_q - 2.0 * KAPPA.sqrt()).abs() <= 1e-15);
    assert_eq!(flow_identity_defect(&eval, &forcing), 0.0);
}

#[test]
fn b_for_known_forcings() {
    let shape = GridShape::new(1, 16).unwrap();
    assert_eq!(compute_b(&PeriodicScalarField::zeros(&shape)), 1.0);
    let c = 0.7;
    assert!((compute_b(&PeriodicScalarField::constant(&shape, c)) - (-c).exp()).abs() <= 1e-15);
    let f = forcing_field(&shape, &[FMode { wave: vec![1, 0, 0, 0], amplitude: 0.5 }]);
    assert!((compute_b(&f) - 1.0 / bessel_i0(0.5)).abs() <= 1e-12);
    let f2 = forcing_field(&shape, &[FMode { wave: vec![0, 0, 1, 0], amplitude: 0.5 }]);
    assert!((compute_b(&f2) - compute_b(&f)).abs() <= 1e-15);
}

#[test]
fn residual_vanishes_exactly_when_the_equation_holds() {
    let e = engine(1, 8);
    let eval = e.evaluate(&PeriodicScalarField::zeros(e.shape()), &PeriodicScalarField::zeros(e.shape())).unwrap();
    assert_eq!(elliptic_residual(&eval, &PeriodicScalarField::zeros(e.shape()), 1.0), 0.0);
    let f = cosine(&e, 0.5);
    let b = compute_b(&f);
    let expected = f.map(|v| (1.0 - b * v.exp()).abs()).max();
    assert_eq!(elliptic_residual(&eval, &f, b), expected);
}

fn states_along_a_run(n: usize, points: usize, steps: u64) -> Vec<(FlowState, qma_flow::flow::Evaluation)> {
    struct Keep(Vec<(FlowState, qma_flow::flow::Evaluation)>);
    impl qma_flow::flow::Observer for Keep {
        fn on_step(
            &mut self,
            state: &FlowState,
            eval: &qma_flow::flow::Evaluation,
            _report: &qma_flow::flow::StepReport,
        ) -> Result<(), qma_flow::flow::FlowError> {
            if state.step % 10 == 0 {
                self.0.push((state.clone(), eval.clone()));
            }
            Ok(())
        }
    }
    let mut config = FlowConfig::new(n, points, KAPPA);
    config.max_steps = steps;
    let e = FlowEngine::new(config.clone()).unwrap();
    let mut wave = vec![0; 4 * n];
    wave[0] = 1;
    wave[4 * n - 1] = 1;
    let forcing = forcing_field(e.shape(), &[FMode { wave, amplitude: 0.4 }]);
    let mut keep = Keep(Vec::new());
    run(&e, FlowState::initial(&config, forcing), Vec::new(), RunOptions { cadence: 1000, c_grad: C_GRAD, halt_at_step: None }, &mut [&mut keep]).unwrap();
    keep.0
}

#[test]
fn dissipation_is_nonnegative_and_m_splits() {
    for (n, points, steps) in [(1, 8, 60), (2, 5, 20)] {
        for (state, eval) in states_along_a_run(n, points, steps) {
            assert!(dissipation_d(&eval, KAPPA, C_GRAD, DerivativeMode::Fd4) >= 0.0);
            let split = energy_f(&eval) + weighted_integral(&state.forcing, &eval.density);
            assert!((mabuchi_m(&eval) - split).abs() <= 1e-10);
            assert!(flow_identity_defect(&eval, &state.forcing) <= 1e-12);
            let m = lemma_monitors(&state, &eval, KAPPA);
            assert!(m.min_phi_t <= m.max_phi_t && m.osc_phi >= 0.0);
        }
    }
}

#[test]
fn csv_round_trip_and_header() {
    let e = engine(1, 8);
    let mut config = e.config().clone();
    config.max_steps = 30;
    let e = FlowEngine::new(config.clone()).unwrap();
    let forcing = cosine(&e, 0.5);
    let out = run(&e, FlowState::initial(&config, forcing), Vec::new(), RunOptions { cadence: 7, c_grad: C_GRAD, halt_at_step: None }, &mut []).unwrap();
    let text = render_csv(&out.records);
    assert_eq!(text.lines().next().unwrap(), "step,t,dt,max_phi_t,min_phi_t,osc_phi,max_lap,maxQ,f,D,f_fd,M,residual,b");
    assert_eq!(text.lines().count(), out.records.len() + 1);
    assert_eq!(parse_csv(&text).unwrap(), out.records);
    assert_eq!(out.records.iter().map(|r| r.step).collect::<Vec<_>>(), vec![0, 7, 14, 21, 28, 30]);
    assert!(parse_csv("step,t\n1,2\n").is_err());
}

#[test]
fn f_second_derivative_fit() {
    let rec = |t: f64, f: f64| DiagnosticsRecord {
        step: 0, t, dt: 0.0, max_phi_t: 0.0, min_phi_t: 0.0, osc_phi: 0.0, max_lap: 0.0, max_q: 0.0,
        f, d: 0.0, f_fd: 0.0, m: 0.0, residual: 0.0, b: 1.0,
    };
    let decay: Vec<_> = (0..40).map(|k| rec(k as f64 * 0.01, (-3.0 * k as f64 * 0.01).exp())).collect();
    let c = fit_f_second_derivative(&decay, 40).unwrap();
    assert!((c - 3.0).abs() <= 1e-3);
    let growth: Vec<_> = (0..40).map(|k| rec(k as f64 * 0.01, (3.0 * k as f64 * 0.01).exp())).collect();
    assert_eq!(fit_f_second_derivative(&growth, 40), Some(0.0));
    let flat: Vec<_> = (0..40).map(|k| rec(k as f64 * 0.01, 1.0)).collect();
    assert_eq!(fit_f_second_derivative(&flat, 40), None);
    assert!(fit_f_second_derivative(&decay[..2], 40).is_none());
}

fn record_strategy() -> impl Strategy<Value = DiagnosticsRecord> {
    (any::<u64>(), prop::array::uniform13(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO)).prop_map(|(step, v)| DiagnosticsRecord {
        step,
        t: v[0],
        dt: v[1],
        max_phi_t: v[2],
        min_phi_t: v[3],
        osc_phi: v[4],
        max_lap: v[5],
        max_q: v[6],
        f: v[7],
        d: v[8],
        f_fd: v[9],
        m: v[10],
        residual: v[11],
        b: v[12],
    })
}

proptest! {
    #[test]
    fn csv_is_lossless(records in prop::collection::vec(record_strategy(), 0..8)) {
        let back = parse_csv(&render_csv(&records)).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in back.iter().zip(&records) {
            prop_assert_eq!(render_row(a), render_row(b));
            prop_assert_eq!(a.t.to_bits(), b.t.to_bits());
            prop_assert_eq!(a.b.to_bits(), b.b.to_bits());
        }
    }

    #[test]
    fn f_fd_is_exact_on_quadratics(a in -2.0f64..2.0, b in -2.0f64..2.0, gaps in prop::collection::vec(0.01f64..0.5, 2..10)) {
        let mut t = 0.0;
        let mut records = Vec::new();
        for (k, g) in std::iter::once(0.0).chain(gaps).enumerate() {
            t += g;
            records.push(DiagnosticsRecord {
                step: k as u64, t, dt: 0.0, max_phi_t: 0.0, min_phi_t: 0.0, osc_phi: 0.0, max_lap: 0.0, max_q: 0.0,
                f: a * t * t + b * t, d: 0.0, f_fd: 0.0, m: 0.0, residual: 0.0, b: 1.0,
            });
        }
        fill_f_fd(&mut records);
        for r in &records {
            prop_assert!((r.f_fd - (2.0 * a * r.t + b)).abs() <= 1e-9);
        }
    }
}
