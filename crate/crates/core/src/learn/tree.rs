//! Unpruned C4.5-style decision tree on numeric features.
//!
//! Splits are binary midpoint thresholds chosen by gain ratio; instances with
//! the split feature missing descend both branches with weight proportional
//! to branch size, both in training and at prediction. Growth stops at purity
//! or below two instances of weight.

use super::discretize::entropy2;
use super::LabeledTable;
use rand_chacha::ChaCha8Rng;

const MIN_SPLIT_WEIGHT: f64 = 2.0;
const MIN_ITEM_WEIGHT: f64 = 1e-6;
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Leaf {
        pos: f64,
        total: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Training weight fraction that went left; routes missing values.
        left_fraction: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone)]
pub struct TreeModel {
    pub(crate) root: Node,
}

impl TreeModel {
    pub(crate) fn score(&self, data: &LabeledTable, row: usize) -> f64 {
        score_node(&self.root, data, row)
    }
}

fn score_node(node: &Node, data: &LabeledTable, row: usize) -> f64 {
    match node {
        Node::Leaf { pos, total } => {
            if *total > 0.0 {
                pos / total
            } else {
                0.5
            }
        }
        Node::Split { feature, threshold, left_fraction, left, right } => {
            match data.value(*feature, row) {
                Some(v) if v <= *threshold => score_node(left, data, row),
                Some(_) => score_node(right, data, row),
                None => {
                    left_fraction * score_node(left, data, row)
                        + (1.0 - left_fraction) * score_node(right, data, row)
                }
            }
        }
    }
}

/// Per-node candidate feature source: every feature, or a random sample
/// without replacement (random-forest style).
pub(crate) enum FeaturePicker {
    All(usize),
    Random { scratch: Vec<usize>, m: usize, rng: ChaCha8Rng },
}

impl FeaturePicker {
    pub(crate) fn all(p: usize) -> Self {
        FeaturePicker::All(p)
    }

    pub(crate) fn random(p: usize, m: usize, rng: ChaCha8Rng) -> Self {
        FeaturePicker::Random { scratch: (0..p).collect(), m, rng }
    }

    fn candidates(&mut self, out: &mut Vec<usize>) {
        out.clear();
        match self {
            FeaturePicker::All(p) => out.extend(0..*p),
            FeaturePicker::Random { scratch, m, rng } => {
                use rand::Rng;
                let n = scratch.len();
                for i in 0..(*m).min(n) {
                    let j = rng.random_range(i..n);
                    scratch.swap(i, j);
                    out.push(scratch[i]);
                }
                out.sort_unstable();
            }
        }
    }
}

/// Grows a tree over `(row, weight)` items.
pub(crate) fn grow(data: &LabeledTable, items: Vec<(u32, f64)>, picker: &mut FeaturePicker) -> Node {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let pos: f64 = items.iter().filter(|(r, _)| data.labels()[*r as usize]).map(|(_, w)| w).sum();
    if total < MIN_SPLIT_WEIGHT || pos <= 0.0 || pos >= total {
        return Node::Leaf { pos, total };
    }
    let mut candidates = Vec::new();
    picker.candidates(&mut candidates);
    let Some(split) = best_split(data, &items, &candidates, total) else {
        return Node::Leaf { pos, total };
    };

    let mut left_items = Vec::new();
    let mut right_items = Vec::new();
    let mut missing = Vec::new();
    let mut left_known = 0.0f64;
    let mut right_known = 0.0f64;
    for (row, w) in items {
        match data.value(split.feature, row as usize) {
            Some(v) if v <= split.threshold => {
                left_known += w;
                left_items.push((row, w));
            }
            Some(_) => {
                right_known += w;
                right_items.push((row, w));
            }
            None => missing.push((row, w)),
        }
    }
    let left_fraction = left_known / (left_known + right_known);
    for (row, w) in missing {
        let wl = w * left_fraction;
        if wl >= MIN_ITEM_WEIGHT {
            left_items.push((row, wl));
        }
        let wr = w * (1.0 - left_fraction);
        if wr >= MIN_ITEM_WEIGHT {
            right_items.push((row, wr));
        }
    }

    let left = grow(data, left_items, picker);
    let right = grow(data, right_items, picker);
    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left_fraction,
        left: Box::new(left),
        right: Box::new(right),
    }
}

struct Split {
    feature: usize,
    threshold: f64,
    gain_ratio: f64,
}

fn best_split(
    data: &LabeledTable,
    items: &[(u32, f64)],
    candidates: &[usize],
    total_weight: f64,
) -> Option<Split> {
    let mut best: Option<Split> = None;
    let mut known: Vec<(f64, f64, bool)> = Vec::with_capacity(items.len());
    for &feature in candidates {
        known.clear();
        let mut missing_weight = 0.0f64;
        let mut known_pos = 0.0f64;
        let mut known_weight = 0.0f64;
        for &(row, w) in items {
            match data.value(feature, row as usize) {
                Some(v) => {
                    let label = data.labels()[row as usize];
                    known.push((v, w, label));
                    known_weight += w;
                    if label {
                        known_pos += w;
                    }
                }
                None => missing_weight += w,
            }
        }
        if known_weight <= 0.0 {
            continue;
        }
        known.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let h_known = entropy2(known_pos, known_weight - known_pos);
        let known_fraction = known_weight / total_weight;

        let mut left_w = 0.0f64;
        let mut left_pos = 0.0f64;
        for i in 1..known.len() {
            left_w += known[i - 1].1;
            if known[i - 1].2 {
                left_pos += known[i - 1].1;
            }
            if known[i].0 == known[i - 1].0 {
                continue;
            }
            let right_w = known_weight - left_w;
            let right_pos = known_pos - left_pos;
            let children = (left_w / known_weight) * entropy2(left_pos, left_w - left_pos)
                + (right_w / known_weight) * entropy2(right_pos, right_w - right_pos);
            let gain = known_fraction * (h_known - children);
            if gain <= MIN_GAIN {
                continue;
            }
            // Split info over the left/right/missing partition of the node.
            let mut split_info = 0.0;
            for w in [left_w, right_w, missing_weight] {
                if w > 0.0 {
                    let f = w / total_weight;
                    split_info -= f * f.log2();
                }
            }
            if split_info <= MIN_GAIN {
                continue;
            }
            let gain_ratio = gain / split_info;
            if best.as_ref().map_or(true, |b| gain_ratio > b.gain_ratio) {
                best = Some(Split {
                    feature,
                    threshold: (known[i - 1].0 + known[i].0) / 2.0,
                    gain_ratio,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::LabeledTable;

    fn toy(values: Vec<Vec<Option<f64>>>, labels: Vec<bool>) -> LabeledTable {
        let names = (0..values.len()).map(|i| format!("f{i}")).collect();
        LabeledTable::new(names, values, labels).unwrap()
    }

    fn items(n: usize) -> Vec<(u32, f64)> {
        (0..n as u32).map(|r| (r, 1.0)).collect()
    }

    #[test]
    fn separable_feature_yields_pure_leaves() {
        let col: Vec<Option<f64>> = (0..10).map(|i| Some(i as f64)).collect();
        let labels: Vec<bool> = (0..10).map(|i| i >= 5).collect();
        let data = toy(vec![col], labels);
        let mut picker = FeaturePicker::all(1);
        let root = grow(&data, items(10), &mut picker);
        let model = TreeModel { root };
        for row in 0..10 {
            let s = model.score(&data, row);
            assert_eq!(s, if row >= 5 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn missing_values_blend_branches() {
        let col: Vec<Option<f64>> = vec![
            Some(0.0), Some(1.0), Some(2.0), Some(3.0),
            Some(10.0), Some(11.0), Some(12.0), None,
        ];
        let labels = vec![false, false, false, false, true, true, true, true];
        let data = toy(vec![col], labels);
        let mut picker = FeaturePicker::all(1);
        let model = TreeModel { root: grow(&data, items(8), &mut picker) };
        let blended = model.score(&data, 7);
        assert!(blended > 0.0 && blended < 1.0, "missing value mixes branch scores: {blended}");
    }

    #[test]
    fn threshold_scales_with_feature() {
        let col: Vec<Option<f64>> = (0..12).map(|i| Some(i as f64)).collect();
        let labels: Vec<bool> = (0..12).map(|i| i >= 6).collect();
        let scaled: Vec<Option<f64>> = col.iter().map(|v| v.map(|x| x * 1000.0)).collect();
        let a = toy(vec![col], labels.clone());
        let b = toy(vec![scaled], labels);
        let ma = TreeModel { root: grow(&a, items(12), &mut FeaturePicker::all(1)) };
        let mb = TreeModel { root: grow(&b, items(12), &mut FeaturePicker::all(1)) };
        for row in 0..12 {
            assert_eq!(ma.score(&a, row), mb.score(&b, row));
        }
    }
}
