//! Bootstrap ensembles over the unpruned tree: random forest (per-node random
//! feature candidates) and bagging (all features).

use super::tree::{grow, FeaturePicker, TreeModel};
use super::{mix_seed, ClassifierSpec, LabeledTable};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct EnsembleModel {
    trees: Vec<TreeModel>,
}

impl EnsembleModel {
    pub(crate) fn score(&self, data: &LabeledTable, row: usize) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.score(data, row)).sum();
        sum / self.trees.len() as f64
    }
}

/// Trains `tree_count` trees on bootstrap resamples. `random_subspace` turns
/// on per-node ⌈√p⌉ feature sampling (random forest); off means bagging.
///
/// The degenerate single-tree, full-candidate configuration skips the
/// bootstrap so it reduces exactly to one unpruned tree.
pub(crate) fn train_ensemble(
    data: &LabeledTable,
    rows: &[usize],
    spec: &ClassifierSpec,
    random_subspace: bool,
) -> EnsembleModel {
    let p = data.n_features();
    let m = if random_subspace {
        spec.split_candidates
            .unwrap_or_else(|| (p as f64).sqrt().ceil() as usize)
            .clamp(1, p)
    } else {
        p
    };
    let bootstrap = !(spec.tree_count == 1 && m >= p);
    let trees: Vec<TreeModel> = (0..spec.tree_count)
        .into_par_iter()
        .map(|member| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, member as u64));
            let items: Vec<(u32, f64)> = if bootstrap {
                // Resample with replacement, collapsing repeats into weights.
                let mut counts = vec![0u32; rows.len()];
                for _ in 0..rows.len() {
                    counts[rng.random_range(0..rows.len())] += 1;
                }
                rows.iter()
                    .zip(counts)
                    .filter(|(_, c)| *c > 0)
                    .map(|(&r, c)| (r as u32, f64::from(c)))
                    .collect()
            } else {
                rows.iter().map(|&r| (r as u32, 1.0)).collect()
            };
            let mut picker = if m < p {
                FeaturePicker::random(p, m, rng)
            } else {
                FeaturePicker::all(p)
            };
            TreeModel { root: grow(data, items, &mut picker) }
        })
        .collect();
    EnsembleModel { trees }
}
