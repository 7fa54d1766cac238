//! Mutation score and subsuming mutants.

use std::collections::BTreeSet;

use super::sim::KillSets;

/// Fraction of killable mutants killed by `tests`; `None` without killable
/// mutants.
pub fn mutation_score(ks: &KillSets, tests: &[usize]) -> Option<f64> {
    let chosen: BTreeSet<usize> = tests.iter().copied().collect();
    let killable = ks.n_killable();
    if killable == 0 {
        return None;
    }
    let killed = ks
        .killers
        .iter()
        .filter(|k| k.iter().any(|t| chosen.contains(t)))
        .count();
    Some(killed as f64 / killable as f64)
}

/// Subsuming mutants: one representative (lowest row) per distinct kill
/// vector among killable mutants, keeping those whose killing tests contain
/// no other vector's killing tests as a strict subset.
pub fn subsuming_set(ks: &KillSets) -> Vec<usize> {
    let mut reps: Vec<(usize, BTreeSet<usize>)> = Vec::new();
    for (r, k) in ks.killers.iter().enumerate() {
        if k.is_empty() {
            continue;
        }
        let set: BTreeSet<usize> = k.iter().copied().collect();
        if !reps.iter().any(|(_, s)| *s == set) {
            reps.push((r, set));
        }
    }
    reps.iter()
        .filter(|(_, s)| !reps.iter().any(|(_, o)| o.len() < s.len() && o.is_subset(s)))
        .map(|(r, _)| *r)
        .collect()
}

/// Row mask of the mutants in `subsuming_set`.
pub fn subsuming_mask(ks: &KillSets) -> Vec<bool> {
    let mut mask = vec![false; ks.n_mutants()];
    for r in subsuming_set(ks) {
        mask[r] = true;
    }
    mask
}

/// Fraction of subsuming mutants killed by `tests`.
pub fn subsuming_score(ks: &KillSets, tests: &[usize]) -> Option<f64> {
    let set = subsuming_set(ks);
    if set.is_empty() {
        return None;
    }
    let chosen: BTreeSet<usize> = tests.iter().copied().collect();
    let killed = set
        .iter()
        .filter(|&&r| ks.killers[r].iter().any(|t| chosen.contains(t)))
        .count();
    Some(killed as f64 / set.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(killers: &[&[usize]], n_tests: usize) -> KillSets {
        KillSets::from_killers(killers.iter().map(|k| k.to_vec()).collect(), vec![false; n_tests])
    }

    #[test]
    fn scores() {
        let k = ks(&[&[0], &[1], &[]], 2);
        assert_eq!(mutation_score(&k, &[0, 1]), Some(1.0));
        assert_eq!(mutation_score(&k, &[0]), Some(0.5));
        assert_eq!(mutation_score(&ks(&[&[]], 1), &[0]), None);
    }

    #[test]
    fn identical_vectors_share_one_representative() {
        let k = ks(&[&[0, 1], &[0, 1]], 2);
        assert_eq!(subsuming_set(&k), vec![0]);
    }

    #[test]
    fn harder_mutants_subsume() {
        // {0} ⊂ {0,1} ⊂ {0,1,2}; {2} is incomparable with {0}.
        let k = ks(&[&[0, 1, 2], &[0], &[0, 1], &[2]], 3);
        assert_eq!(subsuming_set(&k), vec![1, 3]);
        assert_eq!(subsuming_score(&k, &[0]), Some(0.5));
    }
}
