//! Property-based invariants over randomized inputs.

use proptest::prelude::*;

use butterfly_lab::butterfly::{apply_simple, apply_simple_inverse, apply_simple_subsampled};
use butterfly_lab::{OpCounter, Randomizer, RngState, SimpleButterfly, Variant};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simple_apply_preserves_norms(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = RngState::from_seed(seed);
        let b = SimpleButterfly::sample(n, &mut rng);
        let v: Vec<f64> = (0..1 << n).map(|_| rng.standard_normal()).collect();
        let w = apply_simple(&b, &v, &mut OpCounter::new()).unwrap();
        prop_assert!((norm(&v) - norm(&w)).abs() <= 1e-12 * norm(&v).max(1.0));
    }

    #[test]
    fn simple_apply_round_trips(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = RngState::from_seed(seed);
        let b = SimpleButterfly::sample(n, &mut rng);
        let v: Vec<f64> = (0..1 << n).map(|_| rng.standard_normal()).collect();
        let w = apply_simple(&b, &v, &mut OpCounter::new()).unwrap();
        let back = apply_simple_inverse(&b, &w).unwrap();
        let err = v.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12);
    }

    #[test]
    fn subsampled_block_matches_full_product(
        seed in any::<u64>(),
        n in 1usize..=8,
        j_raw in any::<usize>(),
        k_raw in any::<usize>(),
    ) {
        let mut rng = RngState::from_seed(seed);
        let b = SimpleButterfly::sample(n, &mut rng);
        let dim = 1usize << n;
        let v: Vec<f64> = (0..dim).map(|_| rng.standard_normal()).collect();
        let j = 1 + j_raw % dim;
        let k = k_raw % (n + 1);
        let full = apply_simple(&b, &v, &mut OpCounter::new()).unwrap();
        let block = apply_simple_subsampled(&b, &v, j, k, &mut OpCounter::new()).unwrap();
        let len = dim >> k;
        let start = ((j - 1) / len) * len;
        prop_assert_eq!(&block[..], &full[start..start + len]);
    }

    #[test]
    fn randomizers_preserve_norms(seed in any::<u64>(), n in 1usize..=6, which in 0usize..4) {
        let variant = Variant::ALL[which];
        let mut rng = RngState::from_seed(seed);
        let omega = Randomizer::sample(variant, n, &mut rng).unwrap();
        let v: Vec<f64> = (0..1 << n).map(|_| rng.standard_normal()).collect();
        let w = omega.apply(&v, &mut OpCounter::new()).unwrap();
        prop_assert!((norm(&v) - norm(&w)).abs() <= 1e-10 * norm(&v).max(1.0));
    }
}
