//! OneR: a single-attribute interval rule. Intervals over the sorted values
//! must each hold at least `min_bucket` instances of their majority class;
//! adjacent same-class intervals merge; missing values get a bucket of their
//! own. The feature with the best training accuracy wins, earliest first.

use super::LabeledTable;

#[derive(Debug, Clone)]
pub struct OneRModel {
    feature: Option<usize>,
    /// Ascending interval boundaries; values <= boundary[i] fall in interval i.
    boundaries: Vec<f64>,
    /// Positive-class fraction per interval (len = boundaries.len() + 1).
    interval_pos_frac: Vec<f64>,
    missing_pos_frac: f64,
}

struct Rule {
    boundaries: Vec<f64>,
    pos_frac: Vec<f64>,
    correct: usize,
}

fn build_rule(values: &[(f64, bool)], min_bucket: usize) -> Option<Rule> {
    if values.is_empty() {
        return None;
    }
    // Group by distinct value.
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for &(v, label) in values {
        match groups.last_mut() {
            Some((gv, pos, neg)) if *gv == v => {
                if label {
                    *pos += 1;
                } else {
                    *neg += 1;
                }
            }
            _ => groups.push((v, usize::from(label), usize::from(!label))),
        }
    }

    // Greedy intervals: close one as soon as its majority class reaches
    // min_bucket and a boundary (value change) is available.
    let mut intervals: Vec<(usize, usize, Option<f64>)> = Vec::new(); // (pos, neg, upper boundary)
    let mut cur = (0usize, 0usize);
    for (i, &(v, pos, neg)) in groups.iter().enumerate() {
        cur.0 += pos;
        cur.1 += neg;
        let majority = cur.0.max(cur.1);
        if majority >= min_bucket {
            if let Some(&(next_v, _, _)) = groups.get(i + 1) {
                intervals.push((cur.0, cur.1, Some((v + next_v) / 2.0)));
                cur = (0, 0);
            }
        }
    }
    if cur.0 + cur.1 > 0 {
        intervals.push((cur.0, cur.1, None));
    } else if let Some(last) = intervals.last_mut() {
        last.2 = None;
    }
    // Trailing interval that never reached min_bucket merges backwards.
    if intervals.len() > 1 {
        let last = intervals.last().unwrap();
        if last.0.max(last.1) < min_bucket {
            let (pos, neg, _) = intervals.pop().unwrap();
            let prev = intervals.last_mut().unwrap();
            prev.0 += pos;
            prev.1 += neg;
            prev.2 = None;
        }
    }
    // Merge adjacent intervals with the same majority class.
    let majority_of = |pos: usize, neg: usize| pos > neg;
    let mut merged: Vec<(usize, usize, Option<f64>)> = Vec::new();
    for interval in intervals {
        match merged.last_mut() {
            Some(prev) if majority_of(prev.0, prev.1) == majority_of(interval.0, interval.1) => {
                prev.0 += interval.0;
                prev.1 += interval.1;
                prev.2 = interval.2;
            }
            _ => merged.push(interval),
        }
    }

    let correct = merged.iter().map(|(p, n, _)| p.max(n)).sum();
    let boundaries = merged.iter().filter_map(|(_, _, b)| *b).collect();
    let pos_frac = merged.iter().map(|&(p, n, _)| p as f64 / (p + n) as f64).collect();
    Some(Rule { boundaries, pos_frac, correct })
}

pub(crate) fn train_oner(data: &LabeledTable, rows: &[usize], min_bucket: usize) -> OneRModel {
    let n_pos = rows.iter().filter(|&&r| data.labels()[r]).count();
    let global_pos_frac = if rows.is_empty() { 0.5 } else { n_pos as f64 / rows.len() as f64 };

    let mut best: Option<(usize, Rule, f64, usize)> = None; // (correct_total, rule, missing_frac, feature)
    let mut values: Vec<(f64, bool)> = Vec::new();
    for feature in 0..data.n_features() {
        values.clear();
        let mut missing_pos = 0usize;
        let mut missing_neg = 0usize;
        for &row in rows {
            let label = data.labels()[row];
            match data.value(feature, row) {
                Some(v) => values.push((v, label)),
                None if label => missing_pos += 1,
                None => missing_neg += 1,
            }
        }
        values.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let Some(rule) = build_rule(&values, min_bucket) else { continue };
        let missing_total = missing_pos + missing_neg;
        let missing_frac = if missing_total > 0 {
            missing_pos as f64 / missing_total as f64
        } else {
            global_pos_frac
        };
        let correct = rule.correct + missing_pos.max(missing_neg);
        if best.as_ref().map_or(true, |(c, ..)| correct > *c) {
            best = Some((correct, rule, missing_frac, feature));
        }
    }

    match best {
        Some((_, rule, missing_frac, feature)) => OneRModel {
            feature: Some(feature),
            boundaries: rule.boundaries,
            interval_pos_frac: rule.pos_frac,
            missing_pos_frac: missing_frac,
        },
        None => OneRModel {
            feature: None,
            boundaries: Vec::new(),
            interval_pos_frac: vec![global_pos_frac],
            missing_pos_frac: global_pos_frac,
        },
    }
}

impl OneRModel {
    pub(crate) fn score(&self, data: &LabeledTable, row: usize) -> f64 {
        let Some(feature) = self.feature else { return self.missing_pos_frac };
        match data.value(feature, row) {
            None => self.missing_pos_frac,
            Some(v) => {
                let ix = self.boundaries.partition_point(|b| v > *b);
                self.interval_pos_frac[ix]
            }
        }
    }
}
