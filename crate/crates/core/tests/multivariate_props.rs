use lpsi::multivariate::{
    build_reformulation, default_radius, enumerate_patterns, lp_cost, reconstruct_network, solve_l0, solve_lp_exact,
    solve_lp_irl1, Irl1Config, PatternMode, TRACKED_P,
};
use lpsi::DatasetND;
use proptest::prelude::*;

/// Up to 3 distinct points on the half-integer grid of `[-2, 2]^d`.
fn dataset() -> impl Strategy<Value = DatasetND> {
    (1usize..=2, 1usize..=3)
        .prop_flat_map(|(d, n)| {
            (prop::collection::hash_set(prop::collection::vec(-4i32..=4, d), n), prop::collection::vec(-3i32..=3, n))
        })
        .prop_map(|(xs, ys)| {
            let mut xs: Vec<Vec<f64>> = xs.into_iter().map(|x| x.iter().map(|v| *v as f64 / 2.0).collect()).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let ys = ys.iter().take(xs.len()).map(|v| *v as f64).collect();
            DatasetND::new(xs, ys).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn realizable_patterns_suffice(ds in dataset()) {
        let r = default_radius(&ds);
        let all = build_reformulation(&ds, enumerate_patterns(&ds, PatternMode::All).unwrap(), r, true).unwrap();
        let real = build_reformulation(&ds, enumerate_patterns(&ds, PatternMode::Realizable).unwrap(), r, true).unwrap();
        let a = solve_l0(&all, 8).unwrap().found().unwrap();
        let b = solve_l0(&real, 8).unwrap().found().unwrap();
        prop_assert_eq!(a.l0, b.l0);
    }

    #[test]
    fn lifted_solutions_reconstruct(ds in dataset(), p in 0.1f64..0.9) {
        let problem = build_reformulation(&ds, enumerate_patterns(&ds, PatternMode::All).unwrap(), default_radius(&ds), true).unwrap();
        let sparsest = solve_l0(&problem, 8).unwrap().found().unwrap();
        let exact = solve_lp_exact(&problem, p, (sparsest.l0 + 1).min(8)).unwrap();
        let irl1 = solve_lp_irl1(&problem, p, &Irl1Config::default()).unwrap();
        for sol in [&sparsest, &exact.solution, &irl1] {
            sol.check_feasible(&problem).unwrap();
            let net = reconstruct_network(sol, &problem).unwrap();
            prop_assert!(net.neurons.len() <= 2 * problem.patterns.len());
            for q in TRACKED_P {
                prop_assert!((net.path_cost(q, true) - lp_cost(&problem, &sol.z, q)).abs() <= 1e-12 * net.path_cost(q, true).max(1.0));
            }
        }
        // The exact search covers the sparsest point, so it can only do better.
        prop_assert!(exact.solution.cost(p).unwrap() <= lp_cost(&problem, &sparsest.z, p) + 1e-12);
        prop_assert!(exact.solution.l0 >= sparsest.l0);
    }
}

#[test]
fn dropping_the_bias_penalty_never_needs_more() {
    let ds = DatasetND::new(vec![vec![-1.0], vec![0.0], vec![1.0]], vec![1.0, 2.0, 1.0]).unwrap();
    let pats = enumerate_patterns(&ds, PatternMode::All).unwrap();
    let with = build_reformulation(&ds, pats.clone(), default_radius(&ds), true).unwrap();
    let without = build_reformulation(&ds, pats, default_radius(&ds), false).unwrap();
    let a = solve_l0(&with, 8).unwrap().found().unwrap();
    let b = solve_l0(&without, 8).unwrap().found().unwrap();
    assert!(b.l0 <= a.l0);
}
