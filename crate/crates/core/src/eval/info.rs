//! Information gain of features about a binary label.

use std::collections::BTreeMap;

use crate::features::{RawFeatureRecord, BOOLEAN, CATEGORICAL, NUMERIC};

pub const NUMERIC_BINS: usize = 10;

/// Shannon entropy in bits of a label distribution.
pub fn entropy(labels: &[bool]) -> f64 {
    let n = labels.len() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = labels.iter().filter(|&&l| l).count() as f64 / n;
    [p, 1.0 - p].iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum()
}

/// Gain from splitting `labels` by a discrete key.
pub fn information_gain<K: Ord>(keys: &[K], labels: &[bool]) -> f64 {
    let mut parts: BTreeMap<&K, Vec<bool>> = BTreeMap::new();
    for (k, &l) in keys.iter().zip(labels) {
        parts.entry(k).or_default().push(l);
    }
    let n = labels.len() as f64;
    let cond: f64 = parts.values().map(|p| p.len() as f64 / n * entropy(p)).sum();
    (entropy(labels) - cond).max(0.0)
}

/// Equal-width bin index of each value between the observed extremes.
pub fn equal_width_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|&v| {
            if hi <= lo {
                0
            } else {
                (((v - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1)
            }
        })
        .collect()
}

/// Gain of every raw feature, in schema order.
pub fn feature_information_gain(records: &[RawFeatureRecord], labels: &[bool]) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for (i, name) in NUMERIC.iter().enumerate() {
        let v: Vec<f64> = records.iter().map(|r| r.numeric[i]).collect();
        out.push((name.to_string(), information_gain(&equal_width_bins(&v, NUMERIC_BINS), labels)));
    }
    for (i, name) in BOOLEAN.iter().enumerate() {
        let v: Vec<bool> = records.iter().map(|r| r.boolean[i]).collect();
        out.push((name.to_string(), information_gain(&v, labels)));
    }
    for (i, name) in CATEGORICAL.iter().enumerate() {
        let v: Vec<Vec<(&String, &u32)>> = records.iter().map(|r| r.categorical[i].iter().collect()).collect();
        out.push((name.to_string(), information_gain(&v, labels)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_copy_and_constant() {
        let l = [true, false, true, true];
        assert!((information_gain(&l, &l) - entropy(&l)).abs() < 1e-12);
        assert_eq!(information_gain(&[0; 4], &l), 0.0);
    }

    #[test]
    fn hand_entropy() {
        // Keys split {T,T} and {T,F}: H = 0.8113, conditional = 0.5.
        let l = [true, true, true, false];
        let g = information_gain(&[0, 0, 1, 1], &l);
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((g - (h - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn bins_cover_extremes() {
        assert_eq!(equal_width_bins(&[0.0, 0.5, 1.0], 10), vec![0, 5, 9]);
        assert_eq!(equal_width_bins(&[2.0, 2.0], 10), vec![0, 0]);
    }
}
