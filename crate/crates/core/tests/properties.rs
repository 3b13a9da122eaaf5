use proptest::prelude::*;
use qosearch_core::{
    apply_oracle, derive_params, hybrid_profile, random_algorithm, random_unit_state, subdivide,
    BasisLayout, Interval, ThresholdInput,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracles_differ_only_between_their_thresholds(seed: u64, a in 0usize..=32, b in 0usize..=32) {
        let layout = BasisLayout::new(32, 2).unwrap();
        let psi = random_unit_state(layout, &mut ChaCha8Rng::seed_from_u64(seed));
        let (lo, hi) = (a.min(b), a.max(b));
        let x = apply_oracle(&psi, &ThresholdInput::new(32, lo).unwrap()).unwrap();
        let y = apply_oracle(&psi, &ThresholdInput::new(32, hi).unwrap()).unwrap();
        for i in (1..=32).filter(|i| *i <= lo || *i > hi) {
            prop_assert_eq!(x.range_distance(&y, i, i).unwrap(), 0.0);
        }
        prop_assert!((x.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subdivide_contracts_the_weighted_sum(
        seed in 0u64..10_000,
        queries in 1usize..4,
        s in 1usize..5,
        (t, u) in prop_oneof![Just((8usize, 4u32)), Just((16, 3)), Just((4, 6))],
    ) {
        let params = derive_params(18.3, t, u).unwrap();
        let alg = random_algorithm(64, queries, 1, seed).unwrap();
        let rec = subdivide(&alg, Interval::root(64), s, &params).unwrap();
        prop_assert!(rec.sum_after <= params.q_prime() * rec.sum_before + 1e-9);
        prop_assert_eq!(rec.subinterval_sums.len(), t);
        let min = rec.subinterval_sums.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(rec.subinterval_sums[rec.chosen_r - 1], min);
        prop_assert!(Interval::root(64).contains(&rec.child));
        prop_assert_eq!(rec.child.m(), 64 / t);
    }

    #[test]
    fn hybrid_distance_telescopes(seed in 0u64..10_000, queries in 1usize..4, l in 1usize..=16) {
        let alg = random_algorithm(16, queries, 1, seed).unwrap();
        let iv = Interval::new(16, l, 1).unwrap();
        let report = hybrid_profile(&alg, iv, queries, 18.3).unwrap();
        prop_assert!(report.triangle_holds());
        prop_assert!(report.perturbation_holds());
        prop_assert_eq!(report.per_step_distance.len(), queries);
    }
}
