//! Cross-module invariants as property tests.

use proptest::prelude::*;

use tvstair::cantor::{build_cantor_intervals, cantor_function};
use tvstair::energy::{energy_f1_relaxed, energy_f1_relaxed_hat};
use tvstair::hot::{minimize_hot, smoothed_objective, HotConfig};
use tvstair::rof::{rof_discrete_energy, rof_discrete_minimizer, rof_monotone_minimizer, MonotoneDatum};
use tvstair::signals::total_variation;
use tvstair::{DiscreteSignal, ExtReal, Grid, JumpDirection, PiecewiseBVFunction, WeightFunction};

fn signal(values: Vec<f64>) -> DiscreteSignal {
    let grid = Grid::unit(values.len() - 1).unwrap();
    DiscreteSignal::new(grid, values).unwrap()
}

fn values(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0f64..5.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_increasing_and_lipschitz(alpha in 1.1f64..6.0, t1 in -60.0f64..60.0, t2 in -60.0f64..60.0) {
        let w = WeightFunction::builtin(alpha, 1.0).unwrap();
        let (a, b) = (w.psi_transform_f(t1), w.psi_transform_f(t2));
        if t1 < t2 {
            prop_assert!(a < b);
        }
        prop_assert!((a - b).abs() <= w.sup_root() * (t1 - t2).abs() + 1e-12);
        prop_assert_eq!(w.psi_transform(ExtReal::NegInf), 0.0);
        prop_assert_eq!(w.psi_transform(ExtReal::PosInf), w.total_mass());
    }

    #[test]
    fn jump_penalty_symmetric_and_monotone(t1 in -30.0f64..30.0, t2 in -30.0f64..30.0, d in 0.0f64..5.0) {
        let w = WeightFunction::builtin(2.5, 1.0).unwrap();
        let f = ExtReal::Finite;
        for nu in [JumpDirection::Up, JumpDirection::Down] {
            let phi = w.jump_penalty(nu, f(t1), f(t2));
            prop_assert!((phi - w.jump_penalty(nu, f(t2), f(t1))).abs() <= 1e-15);
            let moved = w.jump_penalty(nu, f(t1 + d), f(t2));
            match nu {
                JumpDirection::Up => prop_assert!(moved <= phi + 1e-15),
                JumpDirection::Down => prop_assert!(moved >= phi - 1e-15),
            }
            let split = (w.psi_transform_f(t1) - w.psi_transform_f(t2)).abs() + w.jump_penalty_hat(nu, f(t1), f(t2));
            prop_assert!((phi - split).abs() <= 1e-12);
        }
    }

    #[test]
    fn total_variation_scaling(v in values(3..60), c in -3.0f64..3.0, s in -4.0f64..4.0) {
        let u = signal(v);
        let tv = total_variation(&u);
        prop_assert!((total_variation(&u.map(|x| -x)) - tv).abs() <= 1e-12 * (1.0 + tv));
        prop_assert!((total_variation(&u.map(|x| x + c)) - tv).abs() <= 1e-9 * (1.0 + tv));
        prop_assert!((total_variation(&u.map(|x| s * x)) - s.abs() * tv).abs() <= 1e-9 * (1.0 + tv));
    }

    #[test]
    fn rof_affine_equivariance(v in values(3..80), lambda in 0.5f64..50.0, a in 0.2f64..4.0, b in -3.0f64..3.0) {
        let g = signal(v);
        let u = rof_discrete_minimizer(&g.map(|x| a * x + b), lambda).unwrap();
        let w = rof_discrete_minimizer(&g, a * lambda).unwrap();
        let scale = 1.0 + g.max().abs().max(g.min().abs());
        for (x, y) in u.values().iter().zip(w.values()) {
            prop_assert!((x - (a * y + b)).abs() <= 1e-10 * a * scale * 10.0);
        }
    }

    #[test]
    fn rof_small_lambda_gives_the_mean(v in values(3..80)) {
        let g = signal(v);
        let mean = g.values().iter().sum::<f64>() / g.values().len() as f64;
        let u = rof_discrete_minimizer(&g, 1e-8).unwrap();
        prop_assert!(u.values().iter().all(|x| (x - mean).abs() <= 1e-4));
    }

    #[test]
    fn rof_minimizer_beats_perturbations(v in values(3..40), lambda in 1.0f64..30.0, i in 0usize..40, d in -0.1f64..0.1) {
        prop_assume!(d.abs() > 1e-6);
        let g = signal(v);
        let u = rof_discrete_minimizer(&g, lambda).unwrap();
        let mut p = u.values().to_vec();
        let k = i % p.len();
        p[k] += d;
        let e = rof_discrete_energy(&u, &g, lambda);
        prop_assert!(rof_discrete_energy(&signal(p), &g, lambda) > e);
    }

    #[test]
    fn exact_and_discrete_agree_on_monotone_data(lambda in 5.0f64..60.0, k in 1.0f64..4.0) {
        let datum = MonotoneDatum::custom(0.0, 1.0, move |x: f64| x.powf(k));
        let grid = Grid::unit(1000).unwrap();
        let exact = rof_monotone_minimizer(&datum, lambda).unwrap().sample(&datum, &grid);
        let discrete = rof_discrete_minimizer(&datum.sample(&grid), lambda).unwrap();
        prop_assert!(exact.sup_distance(&discrete) <= 10.0 / 1000.0);
    }

    #[test]
    fn relaxed_bookkeeping(left in -3.0f64..3.0, right in -3.0f64..3.0, jump in prop_oneof![-2.0f64..-0.01, 0.01f64..2.0]) {
        let w = WeightFunction::builtin(2.0, 1.0).unwrap();
        let grid = Grid::unit(100).unwrap();
        let f = PiecewiseBVFunction::step(grid, 0.5, 0.0, jump, ExtReal::Finite(left), ExtReal::Finite(right)).unwrap();
        let a = energy_f1_relaxed(&f, &w).unwrap();
        let b = energy_f1_relaxed_hat(&f, &w).unwrap();
        let total = a.total.to_f64();
        prop_assert!((total - (a.tv_term + a.diffuse_term + a.jump_term)).abs() <= 1e-12);
        prop_assert!((total - b.total.to_f64()).abs() <= 1e-12);
        prop_assert!(total >= a.tv_term);
    }

    #[test]
    fn cantor_levels_are_exact(delta in 0.01f64..0.49, depth in 1usize..12) {
        let f = build_cantor_intervals(delta, depth).unwrap();
        for n in 1..=depth {
            let lv = f.level(n);
            prop_assert_eq!(lv.len(), 1 << (n - 1));
            let len = delta.powi(n as i32 - 1) * (1.0 - 2.0 * delta);
            prop_assert!(lv.iter().all(|iv| (iv.length - len).abs() <= 1e-15 * len.max(1e-300) * 4.0));
        }
        prop_assert!((f.remaining_measure() - (2.0 * delta).powi(depth as i32)).abs() <= 1e-14);
    }

    #[test]
    fn cantor_functions_settle(delta in 0.05f64..(1.0 / 3.0), m in 1usize..10, x in 0.0f64..1.0) {
        let a = build_cantor_intervals(delta, m).unwrap();
        let b = build_cantor_intervals(delta, m + 1).unwrap();
        let gap = (cantor_function(&a, x).unwrap() - cantor_function(&b, x).unwrap()).abs();
        prop_assert!(gap <= 0.5f64.powi(m as i32) + 1e-15);
        prop_assert_eq!(cantor_function(&a, 0.0).unwrap(), 0.0);
        prop_assert_eq!(cantor_function(&a, 1.0).unwrap(), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hot_descends_and_stays_in_range(v in proptest::collection::vec(-1.0f64..1.0, 30..60), p in prop_oneof![Just(1.0), Just(2.0)]) {
        let g = signal(v);
        let cfg = HotConfig::for_signal(9.0, WeightFunction::builtin(3.0, p).unwrap(), &g);
        let r = minimize_hot(&g, &cfg, None).unwrap();
        prop_assert!(r.energy_history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(r.energy <= smoothed_objective(&g, &g, &cfg).unwrap());
        let u = r.minimizer.values();
        prop_assert!(u.iter().all(|x| *x >= g.min() - 1e-6 && *x <= g.max() + 1e-6));
    }
}
