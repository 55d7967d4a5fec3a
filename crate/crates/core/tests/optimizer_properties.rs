use proptest::prelude::*;

use complement_opt::excitation::CouplingConfig;
use complement_opt::measurement::{complementarity_after, gamma_coefficients};
use complement_opt::optimizer::{evaluate, initial_point, maximize, Objective, OptimizerBudget};
use complement_opt::MeasurementBasis;

fn arb_config() -> impl Strategy<Value = CouplingConfig> {
    (1usize..=8, 0.5f64..6.0, 0.01f64..1.5).prop_map(|(n_total, t, angle)| {
        CouplingConfig::new(angle * n_total as f64 / t, t, n_total).unwrap()
    })
}

fn arb_objective() -> impl Strategy<Value = Objective> {
    prop_oneof![
        Just(Objective::Visibility),
        Just(Objective::Predictability),
        Just(Objective::Concurrence)
    ]
}

fn small_budget(seed: u64, restarts: usize) -> OptimizerBudget {
    OptimizerBudget {
        restarts,
        seed,
        ..OptimizerBudget::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn returned_basis_reproduces_result(cfg in arb_config(), objective in arb_objective(), n in 0usize..=4, seed in 0u64..1000) {
        let n = n.min(cfg.n_total());
        let r = maximize(&cfg, n, objective, &small_budget(seed, 4)).unwrap();
        let t = complementarity_after(&gamma_coefficients(&cfg, &r.basis, n).unwrap());
        prop_assert!((t.visibility - r.achieved.visibility).abs() <= 1e-12);
        prop_assert!((t.predictability - r.achieved.predictability).abs() <= 1e-12);
        prop_assert!((t.concurrence - r.achieved.concurrence).abs() <= 1e-12);
        prop_assert!(r.achieved.closure_residual.abs() <= 1e-10);
        for &(theta, phi) in r.basis.angles() {
            prop_assert!((0.0..std::f64::consts::PI).contains(&theta));
            prop_assert!((0.0..std::f64::consts::TAU).contains(&phi));
        }
    }

    #[test]
    fn result_beats_every_start(cfg in arb_config(), objective in arb_objective(), n in 1usize..=4, seed in 0u64..1000) {
        let n = n.min(cfg.n_total());
        let budget = small_budget(seed, 5);
        let r = maximize(&cfg, n, objective, &budget).unwrap();
        prop_assert_eq!(r.start_values.len(), 5);
        for (i, &v) in r.start_values.iter().enumerate() {
            let start = MeasurementBasis::new(initial_point(n, seed, i));
            let direct = evaluate(&cfg, objective, &start);
            prop_assert!(v == direct || (v.is_infinite() && direct.is_infinite()));
            prop_assert!(r.value() >= v - 1e-12);
        }
    }

    #[test]
    fn more_restarts_never_hurt(cfg in arb_config(), objective in arb_objective(), n in 1usize..=4, seed in 0u64..1000) {
        let n = n.min(cfg.n_total());
        let few = maximize(&cfg, n, objective, &small_budget(seed, 2)).unwrap();
        let many = maximize(&cfg, n, objective, &small_budget(seed, 6)).unwrap();
        prop_assert!(many.value() >= few.value() - 1e-12);
    }

    #[test]
    fn same_inputs_same_bits(cfg in arb_config(), objective in arb_objective(), n in 0usize..=3, seed in 0u64..1000) {
        let n = n.min(cfg.n_total());
        let a = maximize(&cfg, n, objective, &small_budget(seed, 3)).unwrap();
        let b = maximize(&cfg, n, objective, &small_budget(seed, 3)).unwrap();
        prop_assert_eq!(a, b);
    }
}
