//! Property-based invariants over randomized instances.

use proptest::prelude::*;

use mep::estimator::{
    alpha_l_estimator, alpha_l_truncated, square_expectation, unbiasedness_check, EstimatorRef,
};
use mep::hull::{lambda_bounds, lambda_point, opt_square, v_optimal_estimator};
use mep::search::feasible_estimator;
use mep::MepInstance;

fn instances() -> impl Strategy<Value = MepInstance> {
    (2..=10usize)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0..=32u32, n),
                prop::collection::vec(0.0..4.0f64, n),
            )
        })
        .prop_filter_map("degenerate grid", |(grid, f)| {
            let mut values: Vec<f64> = grid.iter().map(|&g| g as f64 / 32.0).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            values.dedup();
            let f = f[..values.len()].to_vec();
            MepInstance::new(values, f).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn v_optimal_hull_is_convex_and_minimal(inst in instances()) {
        for j in 0..inst.len() {
            let vopt = v_optimal_estimator(&inst, j);
            // negated hull slopes are non-increasing in u and nonnegative
            let vals = vopt.values();
            prop_assert!(vals.iter().all(|&y| y >= 0.0));
            prop_assert!(vals.windows(2).all(|w| w[0] >= w[1] - 1e-12));
            // the v-optimal square is minimal among the estimators we build
            let opt = opt_square(&inst, j);
            let via_step = square_expectation(&inst, EstimatorRef::Step(&vopt), j);
            prop_assert!((opt - via_step).abs() <= 1e-9 * opt.max(1.0));
            for &alpha in &[1.0, 1.5, 2.0] {
                let form = alpha_l_estimator(&inst, j, alpha).unwrap();
                prop_assert!(form.square_expectation() >= opt - 1e-9 * opt.max(1.0));
            }
        }
    }

    #[test]
    fn alpha_l_is_unbiased_and_nonnegative(inst in instances(), alpha in 1.0..3.0f64) {
        for j in 0..inst.len() {
            let form = alpha_l_estimator(&inst, j, alpha).unwrap();
            let res = unbiasedness_check(&inst, EstimatorRef::AlphaL(&form), j);
            prop_assert!(res.abs() <= 1e-9 * inst.f()[j].max(1.0), "residual {res}");
            for k in 1..=40 {
                prop_assert!(form.eval(k as f64 / 40.0) >= 0.0);
            }
            let trunc = alpha_l_truncated(&inst, j, alpha, 8).unwrap();
            let res = unbiasedness_check(&inst, EstimatorRef::Step(&trunc), j);
            prop_assert!(res.abs() <= 1e-9 * inst.f()[j].max(1.0), "truncated residual {res}");
            prop_assert!(trunc.values().iter().all(|&y| y >= 0.0));
        }
    }

    #[test]
    fn lambda_range_orders(inst in instances(), ki in 0..32usize) {
        let boundaries = inst.partition().boundaries();
        let rho = boundaries[1 + ki % (boundaries.len() - 1)];
        let consistent: Vec<usize> = (0..inst.len())
            .filter(|&j| inst.values()[j] < rho)
            .collect();
        if !consistent.is_empty() {
            let (ll, lu) = lambda_bounds(&inst, rho, &consistent, 0.0).unwrap();
            prop_assert!(ll <= lu + 1e-12);
            for &j in &consistent {
                let l = lambda_point(&inst, j, rho, 0.0).unwrap();
                prop_assert!(ll <= l + 1e-12, "lambda_L {ll} > lambda({j}) {l}");
                prop_assert!(l <= lu + 1e-12, "lambda({j}) {l} > lambda_U {lu}");
            }
        }
    }

    #[test]
    fn feasibility_is_monotone_in_c_for_decreasing_targets(inst in instances(), c in 1.0..6.0f64) {
        // The greedy construction decides feasibility exactly for
        // non-increasing targets (the families of interest); on arbitrary
        // targets it is a sound upper bound but not monotone in c.
        let mut f = inst.f().to_vec();
        f.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let inst = MepInstance::new(inst.values().to_vec(), f).unwrap();
        let lo = feasible_estimator(&inst, c).unwrap().is_feasible();
        let hi = feasible_estimator(&inst, c + 0.5).unwrap().is_feasible();
        prop_assert!(!lo || hi, "feasible at {c} but not at {}", c + 0.5);
    }

    #[test]
    fn produced_tables_are_certified(inst in instances(), c in 1.0..6.0f64) {
        if let Some(table) = feasible_estimator(&inst, c + 0.5).unwrap().table {
            // a produced table is unbiased, nonnegative, and within ratio
            for j in 0..inst.len() {
                let res = unbiasedness_check(&inst, EstimatorRef::Table(&table), j);
                prop_assert!(res.abs() <= 1e-9 * inst.f()[j].max(1.0));
                let sq = square_expectation(&inst, EstimatorRef::Table(&table), j);
                let opt = opt_square(&inst, j);
                if opt > 1e-12 {
                    prop_assert!(sq <= (c + 0.5) * opt * (1.0 + 1e-6));
                }
            }
            prop_assert!(table.y.iter().all(|&y| y >= 0.0));
            prop_assert!(table.z.iter().all(|&z| z >= 0.0));
        }
    }
}
