//! Tester simulations over a kill matrix.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::EvalError;
use crate::exec::KillMatrix;

/// Kill relation in both directions, indexed by matrix row and test column.
#[derive(Clone, Debug)]
pub struct KillSets {
    pub killers: Vec<Vec<usize>>,
    pub victims: Vec<Vec<usize>>,
    pub revealing: Vec<bool>,
}

impl KillSets {
    pub fn new(m: &KillMatrix) -> Self {
        let killers: Vec<Vec<usize>> = (0..m.n_mutants()).map(|r| m.killing_tests(r)).collect();
        Self::from_killers(killers, m.fault_revealing.clone())
    }

    pub fn from_killers(killers: Vec<Vec<usize>>, revealing: Vec<bool>) -> Self {
        let mut victims = vec![Vec::new(); revealing.len()];
        for (r, ts) in killers.iter().enumerate() {
            for &t in ts {
                victims[t].push(r);
            }
        }
        KillSets {
            killers,
            victims,
            revealing,
        }
    }

    pub fn n_mutants(&self) -> usize {
        self.killers.len()
    }

    pub fn n_tests(&self) -> usize {
        self.revealing.len()
    }

    pub fn n_killable(&self) -> usize {
        self.killers.iter().filter(|k| !k.is_empty()).count()
    }
}

/// Seed of repetition `rep`.
pub fn rep_seed(seed: u64, rep: usize) -> u64 {
    seed.wrapping_add(rep as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionOutcome {
    pub probability: f64,
    pub mean_analysed: f64,
    pub mean_tests: f64,
}

/// Random tester working through a selected mutant set: pick a remaining
/// mutant, and if killable a test that kills it, then drop everything that
/// test kills.
pub fn simulate_selection(ks: &KillSets, selected: &[usize], reps: usize, seed: u64) -> Result<SelectionOutcome, EvalError> {
    if selected.is_empty() {
        return Err(EvalError::EmptySelection);
    }
    if reps == 0 {
        return Err(EvalError::NoRepetitions);
    }
    let mut revealed = 0usize;
    let (mut analysed, mut tests) = (0usize, 0usize);
    let mut alive = vec![false; ks.n_mutants()];
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(rep_seed(seed, rep));
        let mut pool: Vec<usize> = selected.to_vec();
        for &r in &pool {
            alive[r] = true;
        }
        let mut hit = false;
        while !pool.is_empty() {
            let m = pool[rng.gen_range(0..pool.len())];
            analysed += 1;
            let killers = &ks.killers[m];
            if killers.is_empty() {
                alive[m] = false;
            } else {
                let t = killers[rng.gen_range(0..killers.len())];
                tests += 1;
                hit |= ks.revealing[t];
                for &v in &ks.victims[t] {
                    alive[v] = false;
                }
            }
            pool.retain(|&r| alive[r]);
        }
        revealed += usize::from(hit);
    }
    let n = reps as f64;
    Ok(SelectionOutcome {
        probability: revealed as f64 / n,
        mean_analysed: analysed as f64 / n,
        mean_tests: tests as f64 / n,
    })
}

/// State after each analysed mutant of a prioritization run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub revealed: bool,
    pub tests: u32,
    /// Killable mutants of the whole matrix killed so far.
    pub killed: u32,
    pub subsuming_killed: u32,
    /// Analysed mutants no test kills.
    pub equivalent: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrioritizationRun {
    /// 1-based count of analysed mutants at first revelation.
    pub k: Option<usize>,
    pub apfd: f64,
    /// Set when the fault was never revealed and `apfd` is the floor value.
    pub floored: bool,
    pub steps: Vec<Step>,
}

impl PrioritizationRun {
    /// State once `budget` mutants are analysed, or the final state when the
    /// run ended earlier.
    pub fn at(&self, budget: usize) -> Option<&Step> {
        if budget == 0 {
            return None;
        }
        self.steps.get(budget.min(self.steps.len()) - 1)
    }

    pub fn revealed_within(&self, budget: usize) -> bool {
        self.k.is_some_and(|k| k <= budget)
    }
}

/// Single-fault APFD of a ranking of length `n` revealing at `k`.
pub fn apfd(k: usize, n: usize) -> f64 {
    let n = n as f64;
    1.0 - k as f64 / n + 1.0 / (2.0 * n)
}

pub fn apfd_floor(n: usize) -> f64 {
    1.0 / (2.0 * n as f64)
}

/// Follow `ranking` (matrix rows), skipping mutants already killed and
/// picking a random killing test for every live killable one.
pub fn simulate_prioritization(
    ks: &KillSets,
    ranking: &[usize],
    subsuming: &[bool],
    reps: usize,
    seed: u64,
) -> Result<Vec<PrioritizationRun>, EvalError> {
    if ranking.is_empty() {
        return Err(EvalError::EmptyRanking);
    }
    let n = ranking.len();
    let mut out = Vec::with_capacity(reps);
    let mut killed = vec![false; ks.n_mutants()];
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(rep_seed(seed, rep));
        killed.iter_mut().for_each(|k| *k = false);
        let mut cur = Step {
            revealed: false,
            tests: 0,
            killed: 0,
            subsuming_killed: 0,
            equivalent: 0,
        };
        let mut k = None;
        let mut steps = Vec::new();
        for &m in ranking {
            if killed[m] {
                continue;
            }
            let killers = &ks.killers[m];
            if killers.is_empty() {
                cur.equivalent += 1;
            } else {
                let t = killers[rng.gen_range(0..killers.len())];
                cur.tests += 1;
                for &v in &ks.victims[t] {
                    if !killed[v] {
                        killed[v] = true;
                        cur.killed += 1;
                        cur.subsuming_killed += u32::from(subsuming.get(v).copied().unwrap_or(false));
                    }
                }
                if ks.revealing[t] && !cur.revealed {
                    cur.revealed = true;
                    k = Some(steps.len() + 1);
                }
            }
            steps.push(cur);
        }
        let (apfd, floored) = match k {
            Some(k) => (apfd(k, n), false),
            None => (apfd_floor(n), true),
        };
        out.push(PrioritizationRun { k, apfd, floored, steps });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(killers: &[&[usize]], revealing: &[bool]) -> KillSets {
        KillSets::from_killers(killers.iter().map(|k| k.to_vec()).collect(), revealing.to_vec())
    }

    #[test]
    fn selection_endpoints() {
        let k = ks(&[&[0]], &[true, false]);
        assert_eq!(simulate_selection(&k, &[0], 50, 1).unwrap().probability, 1.0);
        let k = ks(&[&[], &[]], &[true]);
        assert_eq!(simulate_selection(&k, &[0, 1], 50, 1).unwrap().probability, 0.0);
        assert_eq!(simulate_selection(&k, &[], 50, 1), Err(EvalError::EmptySelection));
    }

    #[test]
    fn apfd_arithmetic() {
        assert!((apfd(1, 10) - 0.95).abs() < 1e-12);
        assert_eq!(apfd(1, 1), 0.5);
        assert_eq!(apfd_floor(4), 0.125);
    }

    #[test]
    fn prioritization_skips_killed_mutants() {
        // Test 0 kills rows 0 and 1; row 2 is revealed by test 1.
        let k = ks(&[&[0], &[0], &[1]], &[false, true]);
        let runs = simulate_prioritization(&k, &[0, 1, 2], &[false; 3], 3, 0).unwrap();
        for r in &runs {
            assert_eq!(r.k, Some(2));
            assert_eq!(r.steps.len(), 2);
            assert_eq!(r.steps[1].killed, 3);
            assert!((r.apfd - apfd(2, 3)).abs() < 1e-12);
        }
        let never = ks(&[&[0]], &[false]);
        let r = &simulate_prioritization(&never, &[0], &[false], 1, 0).unwrap()[0];
        assert!(r.floored);
        assert_eq!(r.apfd, 0.5);
    }
}
