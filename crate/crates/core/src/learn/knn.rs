//! K-nearest-neighbors with range normalization and the classic missing-value
//! distance: 1 for missing-vs-missing, max(x, 1-x) for missing-vs-known.

use super::LabeledTable;

#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    mins: Vec<f64>,
    ranges: Vec<f64>,
    /// Normalized training rows, row-major.
    values: Vec<Option<f64>>,
    labels: Vec<bool>,
    p: usize,
}

pub(crate) fn train_knn(data: &LabeledTable, rows: &[usize], k: usize) -> KnnModel {
    let p = data.n_features();
    let mut mins = vec![f64::INFINITY; p];
    let mut maxs = vec![f64::NEG_INFINITY; p];
    for &row in rows {
        for j in 0..p {
            if let Some(v) = data.value(j, row) {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
    }
    let ranges: Vec<f64> = (0..p)
        .map(|j| if maxs[j] > mins[j] { maxs[j] - mins[j] } else { 0.0 })
        .collect();
    for j in 0..p {
        if !mins[j].is_finite() {
            mins[j] = 0.0;
        }
    }
    let mut values = Vec::with_capacity(rows.len() * p);
    for &row in rows {
        for j in 0..p {
            values.push(data.value(j, row).map(|v| normalize(v, mins[j], ranges[j])));
        }
    }
    KnnModel {
        k,
        mins,
        ranges,
        values,
        labels: rows.iter().map(|&r| data.labels()[r]).collect(),
        p,
    }
}

fn normalize(v: f64, min: f64, range: f64) -> f64 {
    if range > 0.0 {
        (v - min) / range
    } else {
        0.0
    }
}

impl KnnModel {
    pub(crate) fn score(&self, data: &LabeledTable, row: usize) -> f64 {
        let query: Vec<Option<f64>> = (0..self.p)
            .map(|j| data.value(j, row).map(|v| normalize(v, self.mins[j], self.ranges[j])))
            .collect();
        let n_train = self.labels.len();
        let mut distances: Vec<(f64, usize)> = Vec::with_capacity(n_train);
        for t in 0..n_train {
            let mut d2 = 0.0;
            for j in 0..self.p {
                let diff = match (query[j], self.values[t * self.p + j]) {
                    (Some(a), Some(b)) => (a - b).abs(),
                    (None, None) => 1.0,
                    (Some(x), None) | (None, Some(x)) => {
                        let x = x.clamp(0.0, 1.0);
                        x.max(1.0 - x)
                    }
                };
                d2 += diff * diff;
            }
            distances.push((d2, t));
        }
        let k = self.k.min(n_train).max(1);
        distances.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let positives = distances[..k].iter().filter(|(_, t)| self.labels[*t]).count();
        positives as f64 / k as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::LabeledTable;

    #[test]
    fn neighbor_vote_fraction() {
        // Three points labeled (+, +, -); the query sits at the + cluster.
        let col = vec![Some(0.0), Some(0.1), Some(1.0), Some(0.05)];
        let labels = vec![true, true, false, true];
        let data = LabeledTable::new(vec!["x".into()], vec![col], labels).unwrap();
        let model = train_knn(&data, &[0, 1, 2], 3);
        assert!((model.score(&data, 3) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn missing_feature_distances() {
        let col = vec![Some(0.0), Some(1.0), None, Some(0.9)];
        let labels = vec![true, false, true, false];
        let data = LabeledTable::new(vec!["x".into()], vec![col], labels).unwrap();
        let model = train_knn(&data, &[0, 1, 2], 1);
        // Query 0.9 is nearest the known 1.0 (distance 0.1), not the missing
        // row (max(0.9, 0.1) = 0.9).
        assert_eq!(model.score(&data, 3), 0.0);
    }
}
