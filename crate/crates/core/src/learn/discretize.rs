//! Fayyad–Irani MDL discretization for numeric features.
//!
//! Recursively picks the entropy-minimizing binary cut and accepts it only if
//! the information gain clears the minimum-description-length criterion:
//! gain > [log2(N-1) + log2(3^k - 2) - k·E + k1·E1 + k2·E2] / N.

/// Binary class entropy in bits.
pub(crate) fn entropy2(pos: f64, neg: f64) -> f64 {
    let total = pos + neg;
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for w in [pos, neg] {
        if w > 0.0 {
            let p = w / total;
            h -= p * p.log2();
        }
    }
    h
}

fn counts(slice: &[(f64, bool)]) -> (f64, f64) {
    let pos = slice.iter().filter(|(_, l)| *l).count() as f64;
    (pos, slice.len() as f64 - pos)
}

/// Ascending MDL-accepted cut points for (value, label) pairs; sorts the
/// input by value.
pub(crate) fn mdl_cuts(pairs: &mut [(f64, bool)]) -> Vec<f64> {
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut cuts = Vec::new();
    recurse(pairs, &mut cuts);
    cuts.sort_unstable_by(f64::total_cmp);
    cuts
}

fn recurse(slice: &[(f64, bool)], cuts: &mut Vec<f64>) {
    let n = slice.len();
    if n < 2 {
        return;
    }
    let (pos, neg) = counts(slice);
    if pos == 0.0 || neg == 0.0 {
        return;
    }
    let parent_entropy = entropy2(pos, neg);

    // Scan boundaries between distinct values for the entropy-minimizing cut.
    let mut best: Option<(f64, usize)> = None;
    let mut pos_left = 0.0f64;
    for i in 1..n {
        if slice[i - 1].1 {
            pos_left += 1.0;
        }
        if slice[i].0 == slice[i - 1].0 {
            continue;
        }
        let left_n = i as f64;
        let right_n = (n - i) as f64;
        let weighted = (left_n / n as f64) * entropy2(pos_left, left_n - pos_left)
            + (right_n / n as f64) * entropy2(pos - pos_left, right_n - (pos - pos_left));
        if best.map_or(true, |(w, _)| weighted < w) {
            best = Some((weighted, i));
        }
    }
    let Some((weighted_entropy, split)) = best else { return };
    let gain = parent_entropy - weighted_entropy;

    let left = &slice[..split];
    let right = &slice[split..];
    let (lp, ln) = counts(left);
    let (rp, rn) = counts(right);
    let classes = |p: f64, q: f64| (p > 0.0) as i32 + (q > 0.0) as i32;
    let k = classes(pos, neg) as f64;
    let k1 = classes(lp, ln) as f64;
    let k2 = classes(rp, rn) as f64;
    let e1 = entropy2(lp, ln);
    let e2 = entropy2(rp, rn);
    let delta = (3f64.powf(k) - 2.0).log2() - (k * parent_entropy - k1 * e1 - k2 * e2);
    let threshold = ((n as f64 - 1.0).log2() + delta) / n as f64;
    if gain <= threshold {
        return;
    }
    cuts.push((slice[split - 1].0 + slice[split].0) / 2.0);
    recurse(left, cuts);
    recurse(right, cuts);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_split_is_accepted() {
        let mut pairs: Vec<(f64, bool)> =
            (0..20).map(|i| (i as f64, i >= 10)).collect();
        let cuts = mdl_cuts(&mut pairs);
        assert_eq!(cuts, vec![9.5]);
    }

    #[test]
    fn pure_or_constant_data_yields_no_cuts() {
        let mut same_class: Vec<(f64, bool)> = (0..10).map(|i| (i as f64, true)).collect();
        assert!(mdl_cuts(&mut same_class).is_empty());
        let mut same_value: Vec<(f64, bool)> = (0..10).map(|i| (3.0, i % 2 == 0)).collect();
        assert!(mdl_cuts(&mut same_value).is_empty());
    }

    #[test]
    fn noise_is_not_cut() {
        // Alternating labels over distinct values carry no compressible signal.
        let mut pairs: Vec<(f64, bool)> = (0..40).map(|i| (i as f64, i % 2 == 0)).collect();
        assert!(mdl_cuts(&mut pairs).is_empty());
    }

    #[test]
    fn two_signal_boundaries_found() {
        // A positive band inside a negative range needs two cuts; the sample
        // must be large enough for the description-length criterion to pay.
        let mut pairs = Vec::new();
        for i in 0..60 {
            let v = i as f64;
            let label = (20..40).contains(&i);
            pairs.push((v, label));
        }
        let cuts = mdl_cuts(&mut pairs);
        assert_eq!(cuts, vec![19.5, 39.5]);
    }
}
