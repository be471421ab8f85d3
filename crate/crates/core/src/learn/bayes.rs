//! Gaussian naive Bayes. A missing feature value skips that feature's
//! likelihood term; a feature with no observed value in either class is
//! unusable and contributes nothing.

use super::{LabeledTable, LearnError};

const VAR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct ClassGaussian {
    mean: f64,
    var: f64,
}

#[derive(Debug, Clone)]
pub struct NbModel {
    log_prior_pos: f64,
    log_prior_neg: f64,
    feats: Vec<Option<(ClassGaussian, ClassGaussian)>>,
}

fn gaussian_of(values: &[f64]) -> Option<ClassGaussian> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some(ClassGaussian { mean, var: var.max(VAR_FLOOR) })
}

pub(crate) fn train_naive_bayes(data: &LabeledTable, rows: &[usize]) -> Result<NbModel, LearnError> {
    let n_pos = rows.iter().filter(|&&r| data.labels()[r]).count();
    let n_neg = rows.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(LearnError::SingleClass);
    }
    // Laplace-smoothed class priors.
    let n = rows.len() as f64;
    let log_prior_pos = ((n_pos as f64 + 1.0) / (n + 2.0)).ln();
    let log_prior_neg = ((n_neg as f64 + 1.0) / (n + 2.0)).ln();

    let mut feats = Vec::with_capacity(data.n_features());
    let mut pos_vals = Vec::new();
    let mut neg_vals = Vec::new();
    for j in 0..data.n_features() {
        pos_vals.clear();
        neg_vals.clear();
        for &row in rows {
            if let Some(v) = data.value(j, row) {
                if data.labels()[row] {
                    pos_vals.push(v);
                } else {
                    neg_vals.push(v);
                }
            }
        }
        feats.push(match (gaussian_of(&pos_vals), gaussian_of(&neg_vals)) {
            (Some(p), Some(q)) => Some((p, q)),
            _ => None,
        });
    }
    Ok(NbModel { log_prior_pos, log_prior_neg, feats })
}

fn log_density(g: &ClassGaussian, x: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI * g.var).ln() - (x - g.mean).powi(2) / (2.0 * g.var)
}

impl NbModel {
    pub(crate) fn score(&self, data: &LabeledTable, row: usize) -> f64 {
        let mut log_pos = self.log_prior_pos;
        let mut log_neg = self.log_prior_neg;
        for (j, stats) in self.feats.iter().enumerate() {
            let (Some((pos, neg)), Some(x)) = (stats, data.value(j, row)) else { continue };
            log_pos += log_density(pos, x);
            log_neg += log_density(neg, x);
        }
        1.0 / (1.0 + (log_neg - log_pos).exp())
    }
}
