use neurochaos::mlp::{gradient_check, Activation, MlpArchitecture, MlpModel, TrainingConfig};
use neurochaos::Dataset;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_arch(input: usize, hidden: usize, relu: bool) -> MlpArchitecture {
    let mid = if relu { Activation::Relu } else { Activation::Sigmoid };
    MlpArchitecture::new(
        vec![input, hidden, hidden, 2],
        vec![Activation::Sigmoid, mid, Activation::Softmax],
    )
    .unwrap()
}

fn separable(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    let mut labels = Vec::new();
    while instances.len() < n {
        let (x, y): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let margin = x + 0.5 * y;
        if margin.abs() < 0.2 {
            continue;
        }
        instances.push(vec![x, y]);
        labels.push(usize::from(margin > 0.0));
    }
    Dataset::new(instances, labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn backprop_matches_finite_differences(
        seed in any::<u64>(),
        input in 2usize..6,
        hidden in 2usize..6,
        relu in any::<bool>(),
        label in 0usize..2,
        x in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let model = MlpModel::<f64>::new(small_arch(input, hidden, relu), seed).unwrap();
        let err = gradient_check(&model, &x[..input], label, 1e-6).unwrap();
        // a relu kink inside the finite-difference step is the only way to exceed this
        prop_assert!(err < 1e-4, "relative error {}", err);
    }

    #[test]
    fn probabilities_form_a_distribution(seed in any::<u64>(), x in prop::collection::vec(-5.0f64..5.0, 3)) {
        let model = MlpModel::<f64>::new(small_arch(3, 4, true), seed).unwrap();
        let p = model.forward(&x).unwrap().probabilities;
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn learns_linearly_separable_toy_data() {
    let data = separable(200, 1);
    let mut model = MlpModel::<f64>::new(small_arch(2, 16, true), 7).unwrap();
    let config = TrainingConfig {
        learning_rate: 1e-2,
        seed: 3,
        ..TrainingConfig::default()
    };
    let report = model.train(&data, &config).unwrap();
    assert_eq!(report.loss_curve.len(), 30);
    let first = report.loss_curve[0];
    let last = *report.loss_curve.last().unwrap();
    assert!(last < 0.5 * first, "loss {first} -> {last}");
    let acc = model
        .predict_all(&data)
        .unwrap()
        .iter()
        .zip(&data.labels)
        .filter(|(p, l)| p == l)
        .count();
    assert_eq!(acc, data.len());
}

#[test]
fn training_is_seeded() {
    let data = separable(64, 2);
    let config = TrainingConfig {
        epochs: 3,
        learning_rate: 1e-3,
        seed: 11,
        ..TrainingConfig::default()
    };
    let run = |init: u64| {
        let mut m = MlpModel::<f32>::new(small_arch(2, 8, false), init).unwrap();
        let r = m.train(&data, &config).unwrap();
        (m.to_bytes(), r.loss_curve)
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5).0, run(6).0);
}
