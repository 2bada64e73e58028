use neurochaos::chaosfex::{fire_trace, transform_instance, Normalization, NeurochaosConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// First-passage oracle: iterate the tent map and count the samples
/// emitted before the trace enters the epsilon-band around `s`.
fn oracle(q: f64, b: f64, eps: f64, s: f64, max_iter: usize) -> (usize, f64, f64, bool) {
    let mut y = q;
    let (mut n, mut above, mut energy) = (0usize, 0usize, 0.0);
    loop {
        if (y - s).abs() < eps {
            break;
        }
        if n == max_iter {
            let rate = above as f64 / n as f64;
            return (n, rate, energy, false);
        }
        n += 1;
        if y >= b {
            above += 1;
        }
        energy += y * y;
        y = if y < b { y / b } else { (1.0 - y) / (1.0 - b) };
    }
    let rate = if n == 0 { 0.0 } else { above as f64 / n as f64 };
    (n, rate, energy, true)
}

#[test]
fn firing_time_matches_first_passage_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10_000 {
        let q = rng.random_range(0.01..0.99);
        let b = rng.random_range(0.05..0.95);
        let eps = rng.random_range(0.01..0.3);
        let s = rng.random_range(0.0..=1.0);
        let cfg = NeurochaosConfig { q, b, epsilon: eps, max_iter: 10_000 };
        let m = transform_instance(&[s], &cfg).unwrap();
        let (n, rate, energy, recognized) = oracle(q, b, eps, s, cfg.max_iter);
        let f = m.rows[0];
        assert_eq!(f.firing_time, n, "q={q} b={b} eps={eps} s={s}");
        assert_eq!(f.firing_rate, rate);
        assert!((f.energy - energy).abs() <= 1e-12 * energy.max(1.0));
        assert_eq!(m.unrecognized.is_empty(), recognized);
    }
}

proptest! {
    #[test]
    fn wider_band_fires_no_later(q in 0.01f64..0.99, b in 0.1f64..0.9, s in 0.0f64..=1.0, e1 in 0.02f64..0.3, de in 0.0f64..0.2) {
        let narrow = NeurochaosConfig { q, b, epsilon: e1, max_iter: 10_000 };
        let wide = NeurochaosConfig { epsilon: e1 + de, ..narrow };
        let tn = fire_trace(s, &narrow).unwrap();
        let tw = fire_trace(s, &wide).unwrap();
        prop_assert!(tw.samples.len() <= tn.samples.len());
        // the wide trace is a prefix of the narrow one
        prop_assert_eq!(&tn.samples[..tw.samples.len()], &tw.samples[..]);
    }

    #[test]
    fn features_are_bounded(q in 0.01f64..0.99, b in 0.1f64..0.9, eps in 0.01f64..0.3, xs in prop::collection::vec(0.0f64..=1.0, 1..20)) {
        let cfg = NeurochaosConfig { q, b, epsilon: eps, max_iter: 10_000 };
        for f in transform_instance(&xs, &cfg).unwrap().rows {
            prop_assert!(f.energy <= f.firing_time as f64 + 1e-12);
            prop_assert!((0.0..=1.0).contains(&f.firing_rate));
            prop_assert!((0.0..=1.0).contains(&f.entropy));
        }
    }

    #[test]
    fn normalization_maps_into_unit_interval(xs in prop::collection::vec(-1e3f64..1e3, 2..50)) {
        prop_assume!(xs.iter().any(|&v| v != xs[0]));
        let ys = Normalization::PerInstance.apply(&xs).unwrap();
        prop_assert!(ys.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(ys.contains(&0.0) && ys.contains(&1.0));
    }
}
