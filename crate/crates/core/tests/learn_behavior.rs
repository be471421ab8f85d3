//! Cross-cutting classifier behavior: no-signal baselines, invariance to
//! positive rescaling, and missing-value robustness.

use kinspan::learn::{cross_validate, ClassifierKind, ClassifierSpec, LabeledTable};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn gaussian_clusters(n: usize, separation: f64, missing: f64, seed: u64) -> LabeledTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let labels: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    let columns: Vec<Vec<Option<f64>>> = (0..3)
        .map(|_| {
            labels
                .iter()
                .map(|&l| {
                    if missing > 0.0 && rng.random_bool(missing) {
                        None
                    } else {
                        let center = if l { separation } else { 0.0 };
                        Some(center + normal.sample(&mut rng))
                    }
                })
                .collect()
        })
        .collect();
    let names = (0..3).map(|j| format!("f{j}")).collect();
    LabeledTable::new(names, columns, labels).unwrap()
}

#[test]
fn shuffled_labels_score_near_half_on_average() {
    // Destroying the label-feature link leaves every classifier at the random
    // baseline; the mean pooled AUC over seeds sits in a tight band.
    for kind in ClassifierKind::ALL {
        let mut aucs = Vec::new();
        for seed in 0..6u64 {
            let data = gaussian_clusters(300, 8.0, 0.0, 1000 + seed);
            let mut labels = data.labels().to_vec();
            let mut rng = ChaCha8Rng::seed_from_u64(55 + seed);
            labels.shuffle(&mut rng);
            let columns: Vec<Vec<Option<f64>>> = (0..data.n_features())
                .map(|j| (0..data.n_rows()).map(|r| data.value(j, r)).collect())
                .collect();
            let shuffled =
                LabeledTable::new(data.feature_names().to_vec(), columns, labels).unwrap();
            let spec = ClassifierSpec { seed: seed * 7 + 1, ..ClassifierSpec::new(kind) };
            aucs.push(cross_validate(&spec, &shuffled, 10, seed).unwrap().auc);
        }
        let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
        assert!((0.42..=0.58).contains(&mean), "{kind:?} mean auc {mean} from {aucs:?}");
    }
}

#[test]
fn positive_rescaling_leaves_tree_and_knn_predictions_unchanged() {
    let data = gaussian_clusters(200, 6.0, 0.1, 42);
    let scaled_columns: Vec<Vec<Option<f64>>> = (0..data.n_features())
        .map(|j| {
            let k = [0.01, 7.0, 1000.0][j];
            (0..data.n_rows()).map(|r| data.value(j, r).map(|v| v * k)).collect()
        })
        .collect();
    let scaled = LabeledTable::new(
        data.feature_names().to_vec(),
        scaled_columns,
        data.labels().to_vec(),
    )
    .unwrap();
    for kind in [
        ClassifierKind::C45Tree,
        ClassifierKind::Knn,
        ClassifierKind::RandomForest,
        ClassifierKind::Bagging,
        ClassifierKind::OneR,
    ] {
        let spec = ClassifierSpec { seed: 3, ..ClassifierSpec::new(kind) };
        let a = cross_validate(&spec, &data, 10, 17).unwrap();
        let b = cross_validate(&spec, &scaled, 10, 17).unwrap();
        assert_eq!(a, b, "{kind:?} is invariant to positive feature rescaling");
    }
}

#[test]
fn heavy_missingness_still_learns() {
    let data = gaussian_clusters(400, 10.0, 0.4, 7);
    for kind in ClassifierKind::ALL {
        let spec = ClassifierSpec { seed: 5, ..ClassifierSpec::new(kind) };
        let metrics = cross_validate(&spec, &data, 10, 9).unwrap();
        assert!(metrics.auc > 0.8, "{kind:?} auc {} with 40% missing", metrics.auc);
    }
}

#[test]
fn knn_five_behaves_like_knn_three_on_clean_clusters() {
    let data = gaussian_clusters(300, 10.0, 0.0, 21);
    for k in [3, 5] {
        let spec = ClassifierSpec { k, ..ClassifierSpec::new(ClassifierKind::Knn) };
        let metrics = cross_validate(&spec, &data, 10, 2).unwrap();
        assert!(metrics.auc > 0.99, "k={k} auc {}", metrics.auc);
        assert!(metrics.tp_rate > 0.95);
        assert!(metrics.fp_rate < 0.05);
    }
}

#[test]
fn fold_breakdown_covers_all_rows() {
    let data = gaussian_clusters(157, 5.0, 0.0, 3);
    let spec = ClassifierSpec::new(ClassifierKind::NaiveBayes);
    let metrics = cross_validate(&spec, &data, 10, 4).unwrap();
    assert_eq!(metrics.folds.len(), 10);
    let total: usize = metrics.folds.iter().map(|f| f.test_rows).sum();
    assert_eq!(total, 157);
    let sizes: Vec<usize> = metrics.folds.iter().map(|f| f.test_rows).collect();
    let (min, max) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
    assert!(max - min <= 2);
}
