use neurochaos::chaosnet::{cosine_similarity, fit, stratified_folds, EvaluationReport, NormalizationMode};
use neurochaos::{Dataset, NeurochaosConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vectors(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-10.0f64..10.0, len), prop::collection::vec(-10.0f64..10.0, len))
}

/// Macro F1 from explicit TP/FP/FN counts per class.
fn brute_macro_f1(truth: &[usize], pred: &[usize], classes: usize) -> f64 {
    let mut total = 0.0;
    for k in 0..classes {
        let mut tp = 0;
        let mut fp = 0;
        let mut fn_ = 0;
        for (&t, &p) in truth.iter().zip(pred) {
            match (t == k, p == k) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                _ => {}
            }
        }
        if tp > 0 {
            total += 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64;
        }
    }
    total / classes as f64
}

proptest! {
    #[test]
    fn cosine_ignores_positive_scale((u, v) in vectors(12), a in 0.01f64..100.0, b in 0.01f64..100.0) {
        let su: Vec<f64> = u.iter().map(|x| a * x).collect();
        let sv: Vec<f64> = v.iter().map(|x| b * x).collect();
        let c0 = cosine_similarity(&u, &v).unwrap();
        let c1 = cosine_similarity(&su, &sv).unwrap();
        prop_assert!((c0 - c1).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&c0));
    }

    #[test]
    fn cosine_ignores_joint_permutation((u, v) in vectors(16), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..u.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pu: Vec<f64> = order.iter().map(|&i| u[i]).collect();
        let pv: Vec<f64> = order.iter().map(|&i| v[i]).collect();
        let c0 = cosine_similarity(&u, &v).unwrap();
        prop_assert!((c0 - cosine_similarity(&pu, &pv).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn macro_f1_matches_brute_force(pairs in prop::collection::vec((0usize..3, 0usize..3), 1..80)) {
        let (truth, pred): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let r = EvaluationReport::from_predictions(&truth, &pred, 3);
        prop_assert!((r.macro_f1 - brute_macro_f1(&truth, &pred, 3)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&r.macro_f1));
    }

    #[test]
    fn folds_partition_indices(labels in prop::collection::vec(0usize..2, 20..60), seed in any::<u64>()) {
        prop_assume!(labels.iter().filter(|&&l| l == 0).count() >= 5 && labels.iter().filter(|&&l| l == 1).count() >= 5);
        let folds = stratified_folds(&labels, 5, seed).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
    }
}

#[test]
fn zero_vector_has_zero_similarity() {
    assert_eq!(cosine_similarity(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 0.0);
    assert!(cosine_similarity(&[1.0], &[1.0, 2.0]).is_err());
}

#[test]
fn training_order_does_not_change_predictions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut instances = Vec::new();
    let mut labels = Vec::new();
    for i in 0..60 {
        let class = i % 2;
        let offset = if class == 0 { 0.2 } else { 0.6 };
        instances.push((0..30).map(|_| offset + 0.3 * rng.random::<f64>()).collect::<Vec<f64>>());
        labels.push(class);
    }
    let data = Dataset::new(instances, labels).unwrap();
    let cfg = NeurochaosConfig::default();
    let model = fit(&data, cfg, NormalizationMode::TrainingRange).unwrap();

    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng);
    let shuffled = data.subset(&order);
    let model2 = fit(&shuffled, cfg, NormalizationMode::TrainingRange).unwrap();
    assert_eq!(model.predict_all(&data).unwrap(), model2.predict_all(&data).unwrap());
    for (a, b) in model.prototypes.iter().zip(&model2.prototypes) {
        for (x, y) in a.mean_vector.iter().zip(&b.mean_vector) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
    let report = model.evaluate(&data).unwrap();
    assert!(report.macro_f1 > 0.9, "{}", report.macro_f1);
}
