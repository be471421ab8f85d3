//! Evaluation metrics and stratified fold assignment.

use super::LearnError;
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Area under the ROC curve as the Mann–Whitney rank statistic:
/// P(score₊ > score₋) + ½·P(tie), computed with midranks.
pub fn auc(scored: &[(f64, bool)]) -> Result<f64, LearnError> {
    let n_pos = scored.iter().filter(|(_, l)| *l).count();
    let n_neg = scored.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(LearnError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_unstable_by(|&a, &b| scored[a].0.total_cmp(&scored[b].0));
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scored[order[j]].0 == scored[order[i]].0 {
            j += 1;
        }
        // Ranks are 1-based; ties share the midrank.
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &ix in &order[i..j] {
            if scored[ix].1 {
                rank_sum_pos += midrank;
            }
        }
        i = j;
    }
    let n_pos_f = n_pos as f64;
    Ok((rank_sum_pos - n_pos_f * (n_pos_f + 1.0) / 2.0) / (n_pos_f * n_neg as f64))
}

/// Threshold-0.5 confusion metrics for the positive class:
/// (TP rate, FP rate, F-measure).
pub(crate) fn confusion_metrics(scored: &[(f64, bool)]) -> (f64, f64, f64) {
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for (score, label) in scored {
        let predicted = *score >= 0.5;
        match (predicted, *label) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let rate = |num: u64, den: u64| if den > 0 { num as f64 / den as f64 } else { 0.0 };
    let tp_rate = rate(tp, tp + fn_);
    let fp_rate = rate(fp, fp + tn);
    let precision = rate(tp, tp + fp);
    let f_measure = if precision + tp_rate > 0.0 {
        2.0 * precision * tp_rate / (precision + tp_rate)
    } else {
        0.0
    };
    (tp_rate, fp_rate, f_measure)
}

/// Assigns each row a fold in 0..folds, stratified by class: per-class index
/// lists are shuffled and dealt round-robin, so fold sizes and per-fold class
/// counts differ by at most one from proportional.
pub(crate) fn stratified_assignment(labels: &[bool], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    for class in [true, false] {
        let mut indices: Vec<usize> =
            (0..labels.len()).filter(|&i| labels[i] == class).collect();
        indices.shuffle(&mut rng);
        for (k, ix) in indices.into_iter().enumerate() {
            assignment[ix] = k % folds;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_ranking_scores_one() {
        let scored = [(0.9, true), (0.8, true), (0.2, false), (0.1, false)];
        assert_eq!(auc(&scored).unwrap(), 1.0);
    }

    #[test]
    fn three_of_four_pairs_ordered() {
        let scored = [(0.9, true), (0.8, false), (0.7, true), (0.6, false)];
        assert!((auc(&scored).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn all_ties_score_half() {
        let scored = [(0.5, true), (0.5, false), (0.5, true), (0.5, false)];
        assert!((auc(&scored).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_class_is_error() {
        assert!(auc(&[(0.5, true), (0.4, true)]).is_err());
    }

    #[test]
    fn stratified_folds_cover_and_balance() {
        let labels: Vec<bool> = (0..103).map(|i| i % 3 == 0).collect();
        let folds = 10;
        let assignment = stratified_assignment(&labels, folds, 42);
        assert_eq!(assignment.len(), labels.len());
        let mut sizes = vec![0usize; folds];
        let mut positives = vec![0usize; folds];
        for (i, &f) in assignment.iter().enumerate() {
            assert!(f < folds);
            sizes[f] += 1;
            if labels[i] {
                positives[f] += 1;
            }
        }
        assert_eq!(sizes.iter().sum::<usize>(), labels.len());
        let (smin, smax) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        assert!(smax - smin <= 2); // each class contributes at most 1 of slack
        let (pmin, pmax) = (positives.iter().min().unwrap(), positives.iter().max().unwrap());
        assert!(pmax - pmin <= 1);
    }
}
