//! Classifiers and evaluation: OneR, unpruned C4.5, KNN, naive Bayes, random
//! forest, and bagging, scored through stratified 10-fold cross-validation
//! with TP rate, FP rate, F-measure, and AUC, plus information-gain feature
//! ranking over MDL-discretized features.

mod bayes;
mod discretize;
mod forest;
mod knn;
mod metrics;
mod oner;
mod tree;

pub use bayes::NbModel;
pub use forest::EnsembleModel;
pub use knn::KnnModel;
pub use metrics::auc;
pub use oner::OneRModel;
pub use tree::TreeModel;

use crate::features::{FeatureColumn, FeatureTable, TableError};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("training data contains a single class")]
    SingleClass,
    #[error("not enough rows: {got} rows for {need} folds")]
    TooFewRows { got: usize, need: usize },
    #[error("invalid classifier configuration: {0}")]
    InvalidSpec(String),
    #[error("labeled table shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Deterministic per-stream seed derivation (splitmix64 finalizer).
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Predictor matrix (column-major, missing as `None`) plus a binary target.
#[derive(Debug, Clone)]
pub struct LabeledTable {
    feature_names: Vec<String>,
    columns: Vec<Vec<Option<f64>>>,
    labels: Vec<bool>,
}

impl LabeledTable {
    pub fn new(
        feature_names: Vec<String>,
        columns: Vec<Vec<Option<f64>>>,
        labels: Vec<bool>,
    ) -> Result<Self, LearnError> {
        if feature_names.len() != columns.len() {
            return Err(LearnError::Shape(format!(
                "{} names for {} columns",
                feature_names.len(),
                columns.len()
            )));
        }
        for (name, col) in feature_names.iter().zip(&columns) {
            if col.len() != labels.len() {
                return Err(LearnError::Shape(format!(
                    "column `{name}` has {} rows, labels have {}",
                    col.len(),
                    labels.len()
                )));
            }
        }
        Ok(LabeledTable { feature_names, columns, labels })
    }

    /// Builds the classification table from a feature table: predictors are
    /// the set's numeric columns except age of death and death year, unknown
    /// gender becomes missing, and the target is age_of_death >= threshold.
    /// Rows without an age of death are skipped.
    pub fn from_feature_table(table: &FeatureTable, positive_age: f64) -> Result<Self, LearnError> {
        let predictors: Vec<FeatureColumn> = table
            .columns()
            .iter()
            .copied()
            .filter(|c| {
                c.is_numeric() && *c != FeatureColumn::AgeOfDeath && *c != FeatureColumn::DeathYear
            })
            .collect();
        let keep: Vec<usize> = table
            .rows()
            .iter()
            .enumerate()
            .filter(|(_, r)| r.features.age_of_death.is_some())
            .map(|(i, _)| i)
            .collect();
        let labels = keep
            .iter()
            .map(|&i| table.rows()[i].features.age_of_death.expect("filtered") >= positive_age)
            .collect();
        let columns = predictors
            .iter()
            .map(|col| {
                keep.iter()
                    .map(|&i| {
                        let f = &table.rows()[i].features;
                        if *col == FeatureColumn::Gender && f.gender_code == 0 {
                            None // unknown gender is a missing value, not a 0
                        } else {
                            f.numeric(*col)
                        }
                    })
                    .collect()
            })
            .collect();
        let feature_names = predictors.iter().map(|c| c.name().to_string()).collect();
        LabeledTable::new(feature_names, columns, labels)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn value(&self, feature: usize, row: usize) -> Option<f64> {
        self.columns[feature][row]
    }

    pub fn positive_count(&self) -> usize {
        self.labels.iter().filter(|l| **l).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierKind {
    OneR,
    C45Tree,
    Knn,
    NaiveBayes,
    RandomForest,
    Bagging,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 6] = [
        ClassifierKind::OneR,
        ClassifierKind::C45Tree,
        ClassifierKind::Knn,
        ClassifierKind::NaiveBayes,
        ClassifierKind::RandomForest,
        ClassifierKind::Bagging,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::OneR => "one-r",
            ClassifierKind::C45Tree => "c45",
            ClassifierKind::Knn => "knn",
            ClassifierKind::NaiveBayes => "naive-bayes",
            ClassifierKind::RandomForest => "random-forest",
            ClassifierKind::Bagging => "bagging",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "one-r" | "oner" | "1r" => Some(ClassifierKind::OneR),
            "c45" | "c4.5" | "j48" | "tree" => Some(ClassifierKind::C45Tree),
            "knn" | "ibk" | "k-nearest-neighbors" => Some(ClassifierKind::Knn),
            "naive-bayes" | "nb" | "naivebayes" => Some(ClassifierKind::NaiveBayes),
            "random-forest" | "rf" | "randomforest" => Some(ClassifierKind::RandomForest),
            "bagging" => Some(ClassifierKind::Bagging),
            _ => None,
        }
    }
}

/// Classifier configuration. Unused parameters are ignored by other kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    /// Neighbors for KNN.
    pub k: usize,
    /// Members for the ensembles.
    pub tree_count: usize,
    /// OneR minimum majority count per interval.
    pub min_bucket: usize,
    /// Random-forest per-node candidate count; default ⌈√p⌉.
    pub split_candidates: Option<usize>,
    /// Tree pruning stays disabled; a spec asking for it is rejected.
    pub pruning: bool,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind) -> Self {
        ClassifierSpec {
            kind,
            k: 3,
            tree_count: 10,
            min_bucket: 6,
            split_candidates: None,
            pruning: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        if self.pruning {
            return Err(LearnError::InvalidSpec("pruning is not supported; trees grow unpruned".into()));
        }
        if self.k == 0 {
            return Err(LearnError::InvalidSpec("k must be at least 1".into()));
        }
        if self.tree_count == 0 {
            return Err(LearnError::InvalidSpec("tree_count must be at least 1".into()));
        }
        if self.min_bucket == 0 {
            return Err(LearnError::InvalidSpec("min_bucket must be at least 1".into()));
        }
        Ok(())
    }
}

/// A trained classifier; scores are positive-class probabilities in [0, 1].
#[derive(Debug, Clone)]
pub enum Model {
    OneR(OneRModel),
    Tree(TreeModel),
    Knn(KnnModel),
    NaiveBayes(NbModel),
    Ensemble(EnsembleModel),
}

impl Model {
    pub fn score(&self, data: &LabeledTable, row: usize) -> f64 {
        match self {
            Model::OneR(m) => m.score(data, row),
            Model::Tree(m) => m.score(data, row),
            Model::Knn(m) => m.score(data, row),
            Model::NaiveBayes(m) => m.score(data, row),
            Model::Ensemble(m) => m.score(data, row),
        }
    }
}

/// Trains a classifier on the whole table.
pub fn train(spec: &ClassifierSpec, data: &LabeledTable) -> Result<Model, LearnError> {
    let rows: Vec<usize> = (0..data.n_rows()).collect();
    train_on(spec, data, &rows)
}

fn train_on(spec: &ClassifierSpec, data: &LabeledTable, rows: &[usize]) -> Result<Model, LearnError> {
    spec.validate()?;
    if rows.is_empty() {
        return Err(LearnError::Shape("no training rows".into()));
    }
    Ok(match spec.kind {
        ClassifierKind::OneR => Model::OneR(oner::train_oner(data, rows, spec.min_bucket)),
        ClassifierKind::C45Tree => {
            let items = rows.iter().map(|&r| (r as u32, 1.0)).collect();
            let mut picker = tree::FeaturePicker::all(data.n_features());
            Model::Tree(TreeModel { root: tree::grow(data, items, &mut picker) })
        }
        ClassifierKind::Knn => Model::Knn(knn::train_knn(data, rows, spec.k)),
        ClassifierKind::NaiveBayes => Model::NaiveBayes(bayes::train_naive_bayes(data, rows)?),
        ClassifierKind::RandomForest => Model::Ensemble(forest::train_ensemble(data, rows, spec, true)),
        ClassifierKind::Bagging => Model::Ensemble(forest::train_ensemble(data, rows, spec, false)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub test_rows: usize,
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub f_measure: f64,
    /// Absent when the held-out fold lacks a class.
    pub auc: Option<f64>,
}

/// Metrics pooled over all held-out predictions, with a per-fold breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalMetrics {
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub f_measure: f64,
    pub auc: f64,
    pub folds: Vec<FoldMetrics>,
}

/// Stratified k-fold cross-validation: folds are disjoint and covering with
/// per-fold class counts within one of proportional; held-out scores pool
/// into the headline metrics (threshold 0.5 for the confusion counts).
pub fn cross_validate(
    spec: &ClassifierSpec,
    data: &LabeledTable,
    folds: usize,
    seed: u64,
) -> Result<EvalMetrics, LearnError> {
    spec.validate()?;
    if folds < 2 {
        return Err(LearnError::InvalidSpec("need at least 2 folds".into()));
    }
    if data.n_rows() < folds {
        return Err(LearnError::TooFewRows { got: data.n_rows(), need: folds });
    }
    let positives = data.positive_count();
    if positives == 0 || positives == data.n_rows() {
        return Err(LearnError::SingleClass);
    }

    let assignment = metrics::stratified_assignment(data.labels(), folds, seed);
    let per_fold: Vec<Result<Vec<(usize, f64, bool)>, LearnError>> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let train_rows: Vec<usize> =
                (0..data.n_rows()).filter(|&r| assignment[r] != fold).collect();
            let test_rows: Vec<usize> =
                (0..data.n_rows()).filter(|&r| assignment[r] == fold).collect();
            let fold_spec = ClassifierSpec { seed: mix_seed(seed ^ spec.seed, fold as u64), ..spec.clone() };
            let model = train_on(&fold_spec, data, &train_rows)?;
            Ok(test_rows
                .into_iter()
                .map(|r| (r, model.score(data, r), data.labels()[r]))
                .collect())
        })
        .collect();

    let mut fold_metrics = Vec::with_capacity(folds);
    let mut pooled: Vec<(usize, f64, bool)> = Vec::with_capacity(data.n_rows());
    for (fold, result) in per_fold.into_iter().enumerate() {
        let scored = result?;
        let flat: Vec<(f64, bool)> = scored.iter().map(|&(_, s, l)| (s, l)).collect();
        let (tp_rate, fp_rate, f_measure) = metrics::confusion_metrics(&flat);
        fold_metrics.push(FoldMetrics {
            fold,
            test_rows: flat.len(),
            tp_rate,
            fp_rate,
            f_measure,
            auc: metrics::auc(&flat).ok(),
        });
        pooled.extend(scored);
    }
    pooled.sort_unstable_by_key(|&(r, _, _)| r);
    let flat: Vec<(f64, bool)> = pooled.iter().map(|&(_, s, l)| (s, l)).collect();
    let (tp_rate, fp_rate, f_measure) = metrics::confusion_metrics(&flat);
    let auc = metrics::auc(&flat)?;
    Ok(EvalMetrics { tp_rate, fp_rate, f_measure, auc, folds: fold_metrics })
}

/// Ranks features by information gain about the target, each feature
/// discretized by MDL cuts over its present values; the gain over present
/// rows is scaled by the present fraction. Descending, ties in table order.
pub fn information_gain_ranking(data: &LabeledTable) -> Vec<(String, f64)> {
    let n_total = data.n_rows();
    let mut ranked: Vec<(String, f64)> = (0..data.n_features())
        .map(|feature| {
            let mut pairs: Vec<(f64, bool)> = (0..n_total)
                .filter_map(|row| data.value(feature, row).map(|v| (v, data.labels()[row])))
                .collect();
            let gain = if pairs.is_empty() || n_total == 0 {
                0.0
            } else {
                let cuts = discretize::mdl_cuts(&mut pairs);
                let present = pairs.len() as f64;
                let pos: f64 = pairs.iter().filter(|(_, l)| *l).count() as f64;
                let h_present = discretize::entropy2(pos, present - pos);
                // pairs are sorted by value; walk the bins.
                let mut conditional = 0.0;
                let mut start = 0usize;
                for bin in 0..=cuts.len() {
                    let end = if bin < cuts.len() {
                        pairs.partition_point(|(v, _)| *v <= cuts[bin])
                    } else {
                        pairs.len()
                    };
                    if end > start {
                        let w = (end - start) as f64;
                        let bin_pos = pairs[start..end].iter().filter(|(_, l)| *l).count() as f64;
                        conditional += (w / present) * discretize::entropy2(bin_pos, w - bin_pos);
                    }
                    start = end;
                }
                (present / n_total as f64) * (h_present - conditional)
            };
            (data.feature_names()[feature].clone(), gain)
        })
        .collect();
    // Stable sort keeps table order on ties.
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("gains are finite"));
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_table(n: usize, separable: bool, seed: u64) -> LabeledTable {
        // Two clusters on the first feature, noise on the second.
        let mut state = seed.max(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let labels: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
        let signal: Vec<Option<f64>> = labels
            .iter()
            .map(|&l| {
                let base = if l && separable { 10.0 } else { 0.0 };
                Some(base + next())
            })
            .collect();
        let noise: Vec<Option<f64>> = (0..n).map(|_| Some(next())).collect();
        LabeledTable::new(vec!["signal".into(), "noise".into()], vec![signal, noise], labels).unwrap()
    }

    #[test]
    fn every_kind_is_near_perfect_on_separable_data() {
        let data = toy_table(120, true, 7);
        for kind in ClassifierKind::ALL {
            let spec = ClassifierSpec { seed: 11, ..ClassifierSpec::new(kind) };
            let metrics = cross_validate(&spec, &data, 10, 5).unwrap();
            assert!(metrics.auc >= 0.99, "{kind:?} auc = {}", metrics.auc);
        }
    }

    #[test]
    fn ensemble_of_one_tree_with_all_candidates_is_a_single_tree() {
        let data = toy_table(80, true, 3);
        let rows: Vec<usize> = (0..data.n_rows()).collect();
        let tree_spec = ClassifierSpec::new(ClassifierKind::C45Tree);
        let single = train_on(&tree_spec, &data, &rows).unwrap();
        for kind in [ClassifierKind::RandomForest, ClassifierKind::Bagging] {
            let spec = ClassifierSpec {
                tree_count: 1,
                split_candidates: Some(data.n_features()),
                ..ClassifierSpec::new(kind)
            };
            let ensemble = train_on(&spec, &data, &rows).unwrap();
            for row in 0..data.n_rows() {
                assert_eq!(single.score(&data, row), ensemble.score(&data, row), "{kind:?} row {row}");
            }
        }
    }

    #[test]
    fn cv_requires_enough_rows_and_both_classes() {
        let data = toy_table(8, true, 1);
        let spec = ClassifierSpec::new(ClassifierKind::C45Tree);
        assert!(matches!(cross_validate(&spec, &data, 10, 0), Err(LearnError::TooFewRows { .. })));
        let one_class = LabeledTable::new(
            vec!["x".into()],
            vec![(0..20).map(|i| Some(i as f64)).collect()],
            vec![true; 20],
        )
        .unwrap();
        assert!(matches!(cross_validate(&spec, &one_class, 10, 0), Err(LearnError::SingleClass)));
    }

    #[test]
    fn metrics_reproducible_for_fixed_seed() {
        let data = toy_table(100, true, 9);
        let spec = ClassifierSpec { seed: 21, ..ClassifierSpec::new(ClassifierKind::RandomForest) };
        let a = cross_validate(&spec, &data, 10, 13).unwrap();
        let b = cross_validate(&spec, &data, 10, 13).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn perfect_split_gains_one_bit() {
        let col: Vec<Option<f64>> = (0..40).map(|i| Some(if i < 20 { 0.0 } else { 1.0 })).collect();
        let labels: Vec<bool> = (0..40).map(|i| i >= 20).collect();
        let data = LabeledTable::new(vec!["x".into()], vec![col], labels).unwrap();
        let ranked = information_gain_ranking(&data);
        assert_eq!(ranked[0].0, "x");
        assert!((ranked[0].1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_and_all_missing_features_gain_zero() {
        let constant: Vec<Option<f64>> = vec![Some(3.0); 30];
        let missing: Vec<Option<f64>> = vec![None; 30];
        let labels: Vec<bool> = (0..30).map(|i| i % 2 == 0).collect();
        let data = LabeledTable::new(
            vec!["constant".into(), "missing".into()],
            vec![constant, missing],
            labels,
        )
        .unwrap();
        let ranked = information_gain_ranking(&data);
        assert_eq!(ranked[0].1, 0.0);
        assert_eq!(ranked[1].1, 0.0);
        // Ties keep table order.
        assert_eq!(ranked[0].0, "constant");
        assert_eq!(ranked[1].0, "missing");
    }

    #[test]
    fn gender_zero_becomes_missing_in_labeled_table() {
        use crate::features::{FeatureRow, FeatureSet, FeatureTable, FeatureVector};
        let mut f1 = FeatureVector::default();
        f1.age_of_death = Some(85.0);
        f1.gender_code = 0;
        let mut f2 = FeatureVector::default();
        f2.age_of_death = Some(60.0);
        f2.gender_code = 2;
        let table = FeatureTable::from_rows(
            FeatureSet::Full,
            vec![
                FeatureRow { id: "a".into(), features: f1 },
                FeatureRow { id: "b".into(), features: f2 },
            ],
        );
        let data = LabeledTable::from_feature_table(&table, 80.0).unwrap();
        assert_eq!(data.labels(), &[true, false]);
        let g = data.feature_names().iter().position(|n| n == "gender").unwrap();
        assert_eq!(data.value(g, 0), None);
        assert_eq!(data.value(g, 1), Some(2.0));
        // Age of death and death year are never predictors.
        assert!(!data.feature_names().iter().any(|n| n == "age_of_death" || n == "death_year"));
        assert_eq!(data.n_features(), 16);
    }
}
