//! Grouped k-fold splits.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    /// Program ids per fold.
    pub folds: Vec<Vec<String>>,
}

impl FoldPlan {
    pub fn fold_of(&self, program: &str) -> Option<usize> {
        self.folds.iter().position(|f| f.iter().any(|p| p == program))
    }

    /// Programs outside fold `i`.
    pub fn training(&self, i: usize) -> Vec<String> {
        self.folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().cloned())
            .collect()
    }
}

/// Shuffles groups with `seed`, then places each group in the currently
/// smallest fold (lowest index on ties). Fold sizes then differ by at most
/// the largest group size.
pub fn kfold_split(programs: &[(String, String)], k: usize, seed: u64) -> Result<FoldPlan, EvalError> {
    let mut groups: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (program, group) in programs {
        groups.entry(group.as_str()).or_default().push(program.clone());
    }
    if k == 0 || k > groups.len() {
        return Err(EvalError::TooManyFolds { k, groups: groups.len() });
    }
    let mut order: Vec<Vec<String>> = groups.into_values().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds: Vec<Vec<String>> = vec![Vec::new(); k];
    for g in order {
        let i = (0..k).min_by_key(|&i| (folds[i].len(), i)).expect("k > 0");
        folds[i].extend(g);
    }
    for f in &mut folds {
        f.sort();
    }
    Ok(FoldPlan { folds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singles(n: usize) -> Vec<(String, String)> {
        (0..n).map(|i| (format!("p{i}"), format!("g{i}"))).collect()
    }

    #[test]
    fn singleton_groups() {
        let plan = kfold_split(&singles(10), 10, 3).unwrap();
        assert!(plan.folds.iter().all(|f| f.len() == 1));
        assert_eq!(plan, kfold_split(&singles(10), 10, 3).unwrap());
        assert!(kfold_split(&singles(3), 4, 0).is_err());
    }

    #[test]
    fn groups_stay_together() {
        let mut ps = singles(7);
        for i in 0..3 {
            ps.push((format!("q{i}"), "big".into()));
        }
        for seed in 0..20 {
            let plan = kfold_split(&ps, 2, seed).unwrap();
            let f = plan.fold_of("q0").unwrap();
            assert_eq!(plan.fold_of("q1"), Some(f));
            assert_eq!(plan.fold_of("q2"), Some(f));
            let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 3);
        }
    }
}
