use neurochaos::causality::{ccc, granger, granger_at_order, CccConfig, GcConfig};
use neurochaos::dynamics::trial_seed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn driven_pair(n: usize, coupling: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for t in 1..n {
        x[t] = 0.5 * x[t - 1] + rng.random_range(-1.0..1.0);
        y[t] = 0.3 * y[t - 1] + coupling * x[t - 1] + rng.random_range(-1.0..1.0);
    }
    (x, y)
}

fn noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn f_statistic_is_affine_invariant(
        seed in any::<u64>(),
        order in 1usize..4,
        a in 0.1f64..50.0,
        b in -10.0f64..10.0,
        c in -50.0f64..-0.1,
        d in -10.0f64..10.0,
    ) {
        let (x, y) = driven_pair(300, 0.4, seed);
        let base = granger_at_order(&x, &y, order, 0.05).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let ys: Vec<f64> = y.iter().map(|v| c * v + d).collect();
        let moved = granger_at_order(&xs, &ys, order, 0.05).unwrap();
        prop_assert!((base.f_statistic - moved.f_statistic).abs() <= 1e-6 * base.f_statistic.max(1.0));
        prop_assert!((base.p_value - moved.p_value).abs() <= 1e-8);
    }

    #[test]
    fn restricted_fit_never_beats_full_fit(seed in any::<u64>(), order in 1usize..5) {
        let (x, y) = driven_pair(200, 0.0, seed);
        let r = granger_at_order(&x, &y, order, 0.05).unwrap();
        prop_assert!(r.rss_full <= r.rss_restricted * (1.0 + 1e-12));
        prop_assert!(r.f_statistic >= -1e-9 && (0.0..=1.0).contains(&r.p_value));
        prop_assert_eq!(r.samples, 200 - order);
    }
}

#[test]
fn strong_driving_is_detected_in_one_direction_only() {
    let (x, y) = driven_pair(1000, 0.8, 9);
    let cfg = GcConfig::with_max_order(8);
    assert!(granger(&x, &y, &cfg).unwrap().significant);
    assert!(granger(&y, &x, &cfg).unwrap().f_statistic < 10.0);
}

#[test]
fn ccc_null_is_direction_symmetric() {
    // For independent series both directions share one distribution, so their
    // means agree within sampling error even though neither is centred on zero.
    let cfg = CccConfig::default();
    let trials = 400;
    let mut diffs = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(5, i as u64));
        let (x, y) = (noise(600, &mut rng), noise(600, &mut rng));
        diffs.push(ccc(&x, &y, &cfg).unwrap() - ccc(&y, &x, &cfg).unwrap());
    }
    let n = trials as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 3.0 * sd / n.sqrt(), "mean difference {mean}, sd {sd}");
}
