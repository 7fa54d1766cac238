//! Rank-sum test and effect size.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

/// Largest smaller-sample size for which the exact null distribution is used.
pub const EXACT_MAX_SMALL: usize = 12;
/// Largest pooled size for the exact distribution.
pub const EXACT_MAX_TOTAL: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankSum {
    pub p: f64,
    /// Rank sum of the first sample.
    pub w: f64,
    pub method: Method,
}

/// 1-based ranks with ties sharing their mean rank.
pub fn midranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum test. Exact (conditional on ties) for small
/// samples, otherwise the normal approximation with tie and continuity
/// corrections.
pub fn wilcoxon_ranksum(a: &[f64], b: &[f64]) -> RankSum {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be non-empty");
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let w: f64 = ranks[..a.len()].iter().sum();
    let n = pooled.len();
    if a.len().min(b.len()) <= EXACT_MAX_SMALL && n <= EXACT_MAX_TOTAL {
        RankSum {
            p: exact_p(&ranks, a.len()),
            w,
            method: Method::Exact,
        }
    } else {
        RankSum {
            p: normal_p(&pooled, w, a.len(), b.len()),
            w,
            method: Method::Normal,
        }
    }
}

/// Probability under random relabelling that the rank sum of the smaller
/// group lies at least as far from its mean as observed.
fn exact_p(ranks: &[f64], n_a: usize) -> f64 {
    let n = ranks.len();
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let (m, obs) = if n_a <= n - n_a {
        (n_a, doubled[..n_a].iter().sum::<usize>())
    } else {
        (n - n_a, doubled[n_a..].iter().sum::<usize>())
    };
    let max_sum: usize = {
        let mut d = doubled.clone();
        d.sort_unstable_by(|x, y| y.cmp(x));
        d[..m].iter().sum()
    };
    // counts[j][s]: subsets of size j with doubled rank sum s.
    let mut counts = vec![vec![0u128; max_sum + 1]; m + 1];
    counts[0][0] = 1;
    for &r in &doubled {
        for j in (1..=m).rev() {
            let (lo, hi) = counts.split_at_mut(j);
            for s in (r..=max_sum).rev() {
                hi[0][s] += lo[j - 1][s - r];
            }
        }
    }
    let mean = (m * (n + 1)) as i64;
    let dev = (obs as i64 - mean).abs();
    let total: u128 = counts[m].iter().sum();
    let extreme: u128 = counts[m]
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as i64 - mean).abs() >= dev)
        .map(|(_, c)| c)
        .sum();
    (extreme as f64 / total as f64).min(1.0)
}

fn normal_p(pooled: &[f64], w: f64, n_a: usize, n_b: usize) -> f64 {
    let n = (n_a + n_b) as f64;
    let (na, nb) = (n_a as f64, n_b as f64);
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&x| x == sorted[i]).count();
        let t = j as f64;
        ties += t * t * t - t;
        i += j;
    }
    let var = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let mean = na * (n + 1.0) / 2.0;
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

/// Vargha-Delaney effect size: probability that a value from `a` exceeds
/// one from `b`, ties counting half.
pub fn vargha_delaney_a12(a: &[f64], b: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &x in a {
        for &y in b {
            if x > y {
                wins += 1.0;
            } else if x == y {
                wins += 0.5;
            }
        }
    }
    wins / (a.len() * b.len()) as f64
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 { s[n / 2] } else { (s[n / 2 - 1] + s[n / 2]) / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn a12_examples() {
        assert_eq!(vargha_delaney_a12(&[1.0, 2.0], &[1.0, 2.0]), 0.5);
        assert_eq!(vargha_delaney_a12(&[5.0, 6.0], &[1.0, 2.0]), 1.0);
        assert_eq!(vargha_delaney_a12(&[1.0, 2.0], &[0.0, 3.0]), 0.5);
    }

    #[test]
    fn midranks_share_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn exact_small_case() {
        // Ranks {1,2} vs {3,4}: 2 of 6 splits are as extreme.
        let r = wilcoxon_ranksum(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(r.method, Method::Exact);
        assert!((r.p - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(wilcoxon_ranksum(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).p, 1.0);
    }

    #[test]
    fn normal_agrees_with_separated_samples() {
        let a: Vec<f64> = (0..30).map(f64::from).collect();
        let b: Vec<f64> = (100..130).map(f64::from).collect();
        let r = wilcoxon_ranksum(&a, &b);
        assert_eq!(r.method, Method::Normal);
        assert!(r.p < 1e-9);
        assert!(wilcoxon_ranksum(&a, &a).p > 0.99);
    }

    proptest! {
        #[test]
        fn a12_is_complementary(a in prop::collection::vec(0u32..1000, 1..20), b in prop::collection::vec(0u32..1000, 1..20)) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let s = vargha_delaney_a12(&a, &b) + vargha_delaney_a12(&b, &a);
            prop_assert!((s - 1.0).abs() < 1e-12);
        }

        #[test]
        fn p_is_symmetric(a in prop::collection::vec(0u32..20, 1..10), b in prop::collection::vec(0u32..20, 1..10)) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let (x, y) = (wilcoxon_ranksum(&a, &b).p, wilcoxon_ranksum(&b, &a).p);
            prop_assert!((x - y).abs() < 1e-12);
            prop_assert!(x > 0.0 && x <= 1.0);
        }
    }
}
