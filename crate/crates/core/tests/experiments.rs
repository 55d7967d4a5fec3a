use std::f64::consts::{FRAC_PI_4, PI};

use approx::assert_abs_diff_eq;

use complement_opt::excitation::{reservoir_limit_concurrence, CouplingConfig};
use complement_opt::experiments::table::{canonicalize_phase, gauge_fixed, REFERENCE_TABLE};
use complement_opt::experiments::{
    run_delta_d, run_distinguishability_profile, run_quantity_vs_n, run_uniform_sweep,
    ExperimentSpec,
};
use complement_opt::optimizer::{maximize, Objective, OptimizerBudget};

fn curve(
    cfg: CouplingConfig,
    objective: Objective,
) -> Vec<complement_opt::experiments::CurveRecord> {
    run_quantity_vs_n(&ExperimentSpec::new("curve", cfg, objective)).unwrap()
}

#[test]
fn every_curve_row_closes() {
    for cfg in [CouplingConfig::strong(), CouplingConfig::weak()] {
        for objective in Objective::ALL {
            for r in curve(cfg, objective) {
                assert!(r.closure_residual.abs() <= 1e-10, "{objective} n={}", r.n);
                let sum = r.visibility.powi(2) + r.predictability.powi(2) + r.concurrence.powi(2);
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-10);
                assert_eq!(r.angles.len(), 2 * r.n);
                assert!(r.outcome_probability > 0.0 && r.outcome_probability <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn closed_form_maxima() {
    // max V = 1/sqrt(1 + a^2n), max C = 2a^n/(1 + a^2n), max P = 1
    for cfg in [CouplingConfig::strong(), CouplingConfig::weak()] {
        let v = curve(cfg, Objective::Visibility);
        let c = curve(cfg, Objective::Concurrence);
        let p = curve(cfg, Objective::Predictability);
        for n in 1..=cfg.n_total() {
            let a2n = cfg.a().powi(2 * n as i32);
            assert_abs_diff_eq!(v[n].visibility, 1.0 / (1.0 + a2n).sqrt(), epsilon = 1e-8);
            assert_abs_diff_eq!(
                c[n].concurrence,
                2.0 * cfg.a().powi(n as i32) / (1.0 + a2n),
                epsilon = 1e-8
            );
            assert_abs_diff_eq!(p[n].predictability, 1.0, epsilon = 1e-8);
        }
    }
}

#[test]
fn strong_concurrence_tracks_reservoir_decay() {
    let rows = curve(CouplingConfig::strong(), Objective::Concurrence);
    for r in rows.iter().filter(|r| r.n >= 4) {
        assert!(
            (r.concurrence - r.reservoir_concurrence).abs() <= 0.1,
            "n={}",
            r.n
        );
    }
}

#[test]
fn reservoir_column_uses_supplied_rate() {
    let cfg = CouplingConfig::strong();
    let mut spec = ExperimentSpec::new("curve", cfg, Objective::Concurrence);
    spec.n_range = 0..=6;
    spec.k = Some(3.0);
    for r in run_quantity_vs_n(&spec).unwrap() {
        assert_abs_diff_eq!(
            r.reservoir_concurrence,
            reservoir_limit_concurrence(3.0, r.n as f64 * cfg.dt())
        );
    }
    spec.k = None;
    let rows = run_quantity_vs_n(&spec).unwrap();
    assert_abs_diff_eq!(
        rows[1].reservoir_concurrence,
        (-cfg.k() * cfg.dt() / 2.0).exp(),
        epsilon = 1e-15
    );
}

#[test]
fn warm_start_curve_is_no_worse() {
    for cfg in [CouplingConfig::strong(), CouplingConfig::weak()] {
        let cold = curve(cfg, Objective::Visibility);
        let mut spec = ExperimentSpec::new("warm", cfg, Objective::Visibility);
        spec.warm_start = true;
        let warm = run_quantity_vs_n(&spec).unwrap();
        for (c, w) in cold.iter().zip(&warm) {
            assert!(w.visibility >= c.visibility - 1e-9, "n={}", c.n);
        }
    }
}

#[test]
fn uniform_sweep_zero_theta_is_no_eraser() {
    for cfg in [CouplingConfig::strong(), CouplingConfig::weak()] {
        let cells = run_uniform_sweep(&cfg, 20, 36, 0.0).unwrap();
        for cell in cells.iter().filter(|c| c.theta == 0.0 || c.theta == PI) {
            let t = cell.triple.unwrap();
            let an = cfg.a().powi(cell.n as i32);
            assert!(t.visibility <= 1e-12);
            assert_abs_diff_eq!(t.concurrence, 2.0 * an / (1.0 + an * an), epsilon = 1e-12);
            assert!(t.closure_residual.abs() <= 1e-10);
        }
    }
}

#[test]
fn uniform_sweep_regimes() {
    let cfg = CouplingConfig::strong();
    let strong = run_uniform_sweep(&cfg, 20, 4, 0.0).unwrap();
    let at = |n: usize, theta: f64| {
        strong
            .iter()
            .find(|c| c.n == n && (c.theta - theta).abs() < 1e-12)
            .unwrap()
    };
    // at theta = pi/4 the state tends to |00> + r|10> with r = |b| (1 - a^n) / (1 - a)
    for n in [5, 20] {
        let r = cfg.b().norm() * (1.0 - cfg.a().powi(n as i32)) / (1.0 - cfg.a());
        let t = at(n, FRAC_PI_4).triple.unwrap();
        assert_abs_diff_eq!(t.visibility, 2.0 * r / (1.0 + r * r), epsilon = 1e-3);
    }
    assert!(at(20, FRAC_PI_4).triple.unwrap().visibility > 0.9);
    let weak = run_uniform_sweep(&CouplingConfig::weak(), 20, 4, 0.0).unwrap();
    let c = weak
        .iter()
        .find(|c| c.n == 20 && c.theta == 0.0)
        .unwrap()
        .triple
        .unwrap();
    assert!(c.concurrence > 0.99);
    let phi = run_uniform_sweep(&CouplingConfig::weak(), 5, 6, 1.1).unwrap();
    assert!(phi.iter().all(|c| c.phi == 1.1));
}

#[test]
fn weak_predictability_state_is_ground() {
    let cfg = CouplingConfig::weak();
    let r = maximize(
        &cfg,
        10,
        Objective::Predictability,
        &OptimizerBudget::default(),
    )
    .unwrap();
    let s = gauge_fixed(&r.state(&cfg).unwrap());
    assert_abs_diff_eq!(r.achieved.predictability, 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(s.c00.norm(), 1.0, epsilon = 1e-6);
}

#[test]
fn reference_states_are_phase_canonical() {
    for cell in REFERENCE_TABLE {
        let s = canonicalize_phase(&cell.state());
        let pivot = if s.c10.norm() > 1e-6 { s.c10 } else { s.c00 };
        assert!(pivot.im.abs() < 1e-12 && pivot.re >= 0.0);
    }
}

#[test]
fn profile_matches_state_amplitudes() {
    let cfg = CouplingConfig::strong();
    let s = complement_opt::excitation::oracle_evolve(&cfg, 20).unwrap();
    let rows = run_distinguishability_profile(&cfg).unwrap();
    for (r, amp) in rows.iter().zip(s.ancilla_amps()) {
        assert_abs_diff_eq!(r.d_qa_qi, 2.0 * amp.norm_sqr(), epsilon = 1e-14);
    }
    assert_abs_diff_eq!(
        rows[19].d_qa_qb,
        2.0 * s.amp_a1b().norm_sqr(),
        epsilon = 1e-14
    );
}

#[test]
fn delta_d_weak_visibility_is_limited() {
    let rows = run_delta_d(
        &CouplingConfig::weak(),
        Objective::Visibility,
        20,
        &OptimizerBudget::default(),
    )
    .unwrap();
    assert!(rows
        .iter()
        .all(|r| r.delta_d_total > -0.35 && r.delta_d_total < -0.25));
    let strong = run_delta_d(
        &CouplingConfig::strong(),
        Objective::Predictability,
        10,
        &OptimizerBudget::default(),
    )
    .unwrap();
    let a20 = CouplingConfig::strong().a().powi(20);
    assert_abs_diff_eq!(strong[9].delta_d_f, 1.0 - a20, epsilon = 1e-9);
}
