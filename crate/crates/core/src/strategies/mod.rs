//! Mutant rankings and selections.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::ast::NodeId;
use crate::mutation::{Mutant, SelectiveClass};

/// Kill probability at or above which FaRM* deems a mutant likely killable.
pub const KILLABLE_CUTOFF: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("no score for mutant {0}")]
    MissingScore(usize),
    #[error("no score for statement {0:?}")]
    MissingStatementScore(NodeId),
    #[error("no statement for mutant {0}")]
    MissingStatement(usize),
    #[error("budget must be positive")]
    EmptyBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Farm,
    FarmStar,
    PredKillable,
    DummyRandom,
    SpreadRandom,
    Sdl,
    ESelective,
    DefectPrediction,
    /// FaRM fed the true fault-revealing ratios.
    Oracle,
}

impl Strategy {
    pub const ALL: [Strategy; 9] = [
        Strategy::Farm,
        Strategy::FarmStar,
        Strategy::PredKillable,
        Strategy::DummyRandom,
        Strategy::SpreadRandom,
        Strategy::Sdl,
        Strategy::ESelective,
        Strategy::DefectPrediction,
        Strategy::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Farm => "farm",
            Strategy::FarmStar => "farm-star",
            Strategy::PredKillable => "pred-killable",
            Strategy::DummyRandom => "dummy-random",
            Strategy::SpreadRandom => "spread-random",
            Strategy::Sdl => "sdl",
            Strategy::ESelective => "e-selective",
            Strategy::DefectPrediction => "defect-prediction",
            Strategy::Oracle => "oracle",
        }
    }

    pub fn from_name(s: &str) -> Option<Strategy> {
        Strategy::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn is_seeded(self) -> bool {
        matches!(
            self,
            Strategy::DummyRandom | Strategy::SpreadRandom | Strategy::DefectPrediction | Strategy::Sdl | Strategy::ESelective
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub strategy: String,
    pub seed: Option<u64>,
    /// Mutant ids, best first.
    pub order: Vec<usize>,
    /// Score per position, when the strategy has one.
    pub scores: Option<Vec<f64>>,
}

impl Ranking {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rank", "mutant_id", "score", "strategy", "seed"])?;
        for (i, id) in self.order.iter().enumerate() {
            let score = self.scores.as_ref().map(|s| s[i].to_string()).unwrap_or_default();
            let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
            w.write_record([(i + 1).to_string(), id.to_string(), score, self.strategy.clone(), seed])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl Ranking {
    /// Inverse of `write_csv`.
    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Ranking, crate::error::SchemaError> {
        use crate::error::SchemaError;
        let what = "ranking";
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| SchemaError::csv(what, e))?.clone();
        if header.iter().collect::<Vec<_>>() != ["rank", "mutant_id", "score", "strategy", "seed"] {
            return Err(SchemaError::at(what, 1, 1, "unexpected header"));
        }
        let mut out = Ranking {
            strategy: String::new(),
            seed: None,
            order: Vec::new(),
            scores: Some(Vec::new()),
        };
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| SchemaError::csv(what, e))?;
            let field = |c: usize| rec.get(c).unwrap_or("");
            if field(0) != (i + 1).to_string() {
                return Err(SchemaError::at(what, line, 1, format!("expected rank {}", i + 1)));
            }
            let id = field(1)
                .parse()
                .map_err(|_| SchemaError::at(what, line, 2, format!("bad mutant id `{}`", field(1))))?;
            out.order.push(id);
            if field(2).is_empty() {
                out.scores = None;
            } else if let Some(s) = out.scores.as_mut() {
                s.push(
                    field(2)
                        .parse()
                        .map_err(|_| SchemaError::at(what, line, 3, format!("bad score `{}`", field(2))))?,
                );
            }
            out.strategy = field(3).to_string();
            out.seed = match field(4) {
                "" => None,
                v => Some(v.parse().map_err(|_| SchemaError::at(what, line, 5, format!("bad seed `{v}`")))?),
            };
        }
        if out.order.is_empty() {
            out.scores = None;
        }
        Ok(out)
    }
}

fn score_of(scores: &BTreeMap<usize, f64>, id: usize) -> Result<f64, StrategyError> {
    scores.get(&id).copied().ok_or(StrategyError::MissingScore(id))
}

/// Descending by score; ties by ascending id.
fn sort_desc(ids: &mut [(usize, f64)]) {
    ids.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

pub fn rank_by_probability(strategy: &str, ids: &[usize], scores: &BTreeMap<usize, f64>) -> Result<Ranking, StrategyError> {
    let mut v = ids
        .iter()
        .map(|&id| Ok((id, score_of(scores, id)?)))
        .collect::<Result<Vec<_>, _>>()?;
    sort_desc(&mut v);
    Ok(Ranking {
        strategy: strategy.to_string(),
        seed: None,
        order: v.iter().map(|x| x.0).collect(),
        scores: Some(v.iter().map(|x| x.1).collect()),
    })
}

/// Likely-killable mutants first, each part by fault-revealing probability.
pub fn rank_farm_star(
    ids: &[usize],
    kill_prob: &BTreeMap<usize, f64>,
    fr_prob: &BTreeMap<usize, f64>,
) -> Result<Ranking, StrategyError> {
    let mut likely = Vec::new();
    let mut rest = Vec::new();
    for &id in ids {
        let k = score_of(kill_prob, id)?;
        let f = score_of(fr_prob, id)?;
        if k >= KILLABLE_CUTOFF {
            likely.push((id, f));
        } else {
            rest.push((id, f));
        }
    }
    sort_desc(&mut likely);
    sort_desc(&mut rest);
    likely.extend(rest);
    Ok(Ranking {
        strategy: Strategy::FarmStar.name().to_string(),
        seed: None,
        order: likely.iter().map(|x| x.0).collect(),
        scores: Some(likely.iter().map(|x| x.1).collect()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RandomMode {
    Dummy,
    Spread,
}

/// Round-based statement-spread order: each round visits the statements
/// with unused mutants in a fresh random order and takes one random mutant
/// from each.
fn spread(ids: &[usize], stmt_of: &BTreeMap<usize, NodeId>, rng: &mut ChaCha8Rng) -> Result<Vec<usize>, StrategyError> {
    let mut groups: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for &id in ids {
        let s = *stmt_of.get(&id).ok_or(StrategyError::MissingStatement(id))?;
        groups.entry(s).or_default().push(id);
    }
    let mut pools: Vec<Vec<usize>> = groups.into_values().collect();
    for p in &mut pools {
        p.sort_unstable();
        p.shuffle(rng);
    }
    let mut order = Vec::with_capacity(ids.len());
    loop {
        let mut live: Vec<usize> = (0..pools.len()).filter(|&i| !pools[i].is_empty()).collect();
        if live.is_empty() {
            break;
        }
        live.shuffle(rng);
        for i in live {
            order.push(pools[i].pop().expect("non-empty pool"));
        }
    }
    Ok(order)
}

pub fn rank_random(
    ids: &[usize],
    mode: RandomMode,
    stmt_of: &BTreeMap<usize, NodeId>,
    seed: u64,
) -> Result<Ranking, StrategyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (order, strategy) = match mode {
        RandomMode::Dummy => {
            let mut v = ids.to_vec();
            v.sort_unstable();
            v.shuffle(&mut rng);
            (v, Strategy::DummyRandom)
        }
        RandomMode::Spread => (spread(ids, stmt_of, &mut rng)?, Strategy::SpreadRandom),
    };
    Ok(Ranking {
        strategy: strategy.name().to_string(),
        seed: Some(seed),
        order,
        scores: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorSet {
    Sdl,
    ESelective,
}

/// Ids of the mutants in a selective operator set.
pub fn filter_operator_set(mutants: &[Mutant], set: OperatorSet) -> Vec<usize> {
    mutants
        .iter()
        .filter(|m| match set {
            OperatorSet::Sdl => m.is_deletion(),
            OperatorSet::ESelective => matches!(
                m.selective_class(),
                Some(
                    SelectiveClass::Relational
                        | SelectiveClass::Logical
                        | SelectiveClass::Arithmetic
                        | SelectiveClass::Unary
                        | SelectiveClass::Abs
                )
            ),
        })
        .map(|m| m.id)
        .collect()
}

/// Higher-scored statements first. Statements with equal scores form a
/// class whose mutants are interleaved as in the spread order.
pub fn rank_defect_prediction(
    ids: &[usize],
    stmt_of: &BTreeMap<usize, NodeId>,
    stmt_scores: &BTreeMap<NodeId, f64>,
    seed: u64,
) -> Result<Ranking, StrategyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut by_stmt: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for &id in ids {
        let s = *stmt_of.get(&id).ok_or(StrategyError::MissingStatement(id))?;
        by_stmt.entry(s).or_default().push(id);
    }
    let mut stmts = by_stmt
        .keys()
        .map(|&s| Ok((s, *stmt_scores.get(&s).ok_or(StrategyError::MissingStatementScore(s))?)))
        .collect::<Result<Vec<_>, StrategyError>>()?;
    stmts.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (s, score) in stmts {
        match classes.last_mut() {
            Some((c, members)) if *c == score => members.extend(&by_stmt[&s]),
            _ => classes.push((score, by_stmt[&s].clone())),
        }
    }
    let mut order = Vec::with_capacity(ids.len());
    let mut scores = Vec::with_capacity(ids.len());
    for (score, members) in classes {
        let part = spread(&members, stmt_of, &mut rng)?;
        scores.extend(std::iter::repeat(score).take(part.len()));
        order.extend(part);
    }
    Ok(Ranking {
        strategy: Strategy::DefectPrediction.name().to_string(),
        seed: Some(seed),
        order,
        scores: Some(scores),
    })
}

/// Default statement scorer: the number of mutants on each statement.
pub fn complexity_scores(mutants: &[Mutant]) -> BTreeMap<NodeId, f64> {
    let mut out: BTreeMap<NodeId, f64> = BTreeMap::new();
    for m in mutants {
        *out.entry(m.stmt).or_default() += 1.0;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Count(usize),
    Percent(f64),
}

impl Budget {
    /// Number of mutants selected from a population of `n`, before
    /// clamping.
    pub fn size(self, n: usize) -> usize {
        match self {
            Budget::Count(k) => k,
            Budget::Percent(p) => ((p / 100.0 * n as f64 - 1e-9).ceil() as usize).max(1),
        }
    }
}

/// Top of a ranking. Budgets larger than the ranking are clamped.
pub fn truncate_top(ranking: &Ranking, budget: Budget) -> Result<Vec<usize>, StrategyError> {
    let k = match budget {
        Budget::Count(0) => return Err(StrategyError::EmptyBudget),
        Budget::Percent(p) if p <= 0.0 => return Err(StrategyError::EmptyBudget),
        b => b.size(ranking.len()),
    };
    if k > ranking.len() {
        log::warn!("budget {k} exceeds {} ranked mutants; clamping", ranking.len());
    }
    Ok(ranking.order[..k.min(ranking.len())].to_vec())
}

/// Whether `order` is a permutation of `ids`.
pub fn is_permutation(order: &[usize], ids: &[usize]) -> bool {
    let set: HashSet<usize> = order.iter().copied().collect();
    set.len() == order.len() && order.len() == ids.len() && ids.iter().all(|i| set.contains(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scores(v: &[(usize, f64)]) -> BTreeMap<usize, f64> {
        v.iter().copied().collect()
    }

    #[test]
    fn probability_order_and_ties() {
        let r = rank_by_probability("farm", &[1, 2], &scores(&[(1, 0.9), (2, 0.1)])).unwrap();
        assert_eq!(r.order, vec![1, 2]);
        let r = rank_by_probability("farm", &[3, 1, 2], &scores(&[(1, 0.5), (2, 0.5), (3, 0.5)])).unwrap();
        assert_eq!(r.order, vec![1, 2, 3]);
        assert_eq!(
            rank_by_probability("farm", &[4], &scores(&[])),
            Err(StrategyError::MissingScore(4))
        );
    }

    #[test]
    fn farm_star_partition() {
        let k = scores(&[(1, 0.9), (2, 0.2)]);
        let f = scores(&[(1, 0.1), (2, 0.99)]);
        assert_eq!(rank_farm_star(&[1, 2], &k, &f).unwrap().order, vec![1, 2]);
        let k = scores(&[(1, 0.5), (2, 0.7), (3, 0.9)]);
        let f = scores(&[(1, 0.3), (2, 0.1), (3, 0.2)]);
        assert_eq!(
            rank_farm_star(&[1, 2, 3], &k, &f).unwrap().order,
            rank_by_probability("farm", &[1, 2, 3], &f).unwrap().order
        );
    }

    #[test]
    fn spread_alternates_statements() {
        let stmt: BTreeMap<usize, NodeId> = (0..6).map(|i| (i, NodeId(i as u32 / 3))).collect();
        let ids: Vec<usize> = (0..6).collect();
        let r = rank_random(&ids, RandomMode::Spread, &stmt, 3).unwrap();
        assert_ne!(stmt[&r.order[0]], stmt[&r.order[1]]);
        assert!(is_permutation(&r.order, &ids));
    }

    #[test]
    fn spread_first_statement_is_balanced() {
        let stmt: BTreeMap<usize, NodeId> = (0..6).map(|i| (i, NodeId(i as u32 / 3))).collect();
        let ids: Vec<usize> = (0..6).collect();
        let trials = 10_000;
        let first_zero = (0..trials)
            .filter(|&s| stmt[&rank_random(&ids, RandomMode::Spread, &stmt, s).unwrap().order[0]] == NodeId(0))
            .count();
        let frac = first_zero as f64 / trials as f64;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
    }

    #[test]
    fn dummy_is_reproducible() {
        let ids = [5, 6, 7];
        let a = rank_random(&ids, RandomMode::Dummy, &BTreeMap::new(), 11).unwrap();
        assert_eq!(a, rank_random(&ids, RandomMode::Dummy, &BTreeMap::new(), 11).unwrap());
    }

    #[test]
    fn defect_prediction_orders_statements() {
        let stmt: BTreeMap<usize, NodeId> = (0..6).map(|i| (i, NodeId(i as u32 % 2))).collect();
        let ids: Vec<usize> = (0..6).collect();
        let sc: BTreeMap<NodeId, f64> = [(NodeId(0), 0.1), (NodeId(1), 0.9)].into_iter().collect();
        let r = rank_defect_prediction(&ids, &stmt, &sc, 1).unwrap();
        assert!(r.order[..3].iter().all(|m| stmt[m] == NodeId(1)));
        let missing: BTreeMap<NodeId, f64> = [(NodeId(0), 0.1)].into_iter().collect();
        assert!(rank_defect_prediction(&ids, &stmt, &missing, 1).is_err());
    }

    #[test]
    fn truncation_rounds_up() {
        let r = Ranking {
            strategy: "x".into(),
            seed: None,
            order: (0..10).collect(),
            scores: None,
        };
        assert_eq!(truncate_top(&r, Budget::Percent(20.0)).unwrap().len(), 2);
        let r3 = Ranking {
            order: vec![0, 1, 2],
            ..r.clone()
        };
        assert_eq!(truncate_top(&r3, Budget::Percent(10.0)).unwrap().len(), 1);
        assert_eq!(truncate_top(&r3, Budget::Count(7)).unwrap().len(), 3);
        assert_eq!(truncate_top(&r3, Budget::Count(0)), Err(StrategyError::EmptyBudget));
    }

    #[test]
    fn csv_round_trip() {
        let r = rank_random(&[4, 9, 2, 7], RandomMode::Dummy, &BTreeMap::new(), 5).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(Ranking::read_csv(buf.as_slice()).unwrap(), r);
        let p = rank_by_probability("farm", &[1, 2], &scores(&[(1, 0.25), (2, 0.75)])).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(Ranking::read_csv(buf.as_slice()).unwrap(), p);
        let bad = "rank,mutant_id,score,strategy,seed\n1,x,,a,\n";
        assert_eq!(Ranking::read_csv(bad.as_bytes()).unwrap_err().column, 2);
    }

    proptest! {
        #[test]
        fn monotone_transforms_keep_the_order(v in prop::collection::vec(0.0f64..1.0, 1..30)) {
            let ids: Vec<usize> = (0..v.len()).collect();
            let s: BTreeMap<usize, f64> = v.iter().copied().enumerate().collect();
            let t: BTreeMap<usize, f64> = s.iter().map(|(&k, &x)| (k, 3.0 * x * x * x + 1.0)).collect();
            prop_assert_eq!(
                rank_by_probability("a", &ids, &s).unwrap().order,
                rank_by_probability("a", &ids, &t).unwrap().order
            );
        }

        #[test]
        fn every_strategy_permutes(n in 1usize..40, seed in 0u64..100) {
            let ids: Vec<usize> = (0..n).map(|i| i * 3).collect();
            let stmt: BTreeMap<usize, NodeId> = ids.iter().map(|&i| (i, NodeId((i % 5) as u32))).collect();
            let sc: BTreeMap<usize, f64> = ids.iter().map(|&i| (i, ((i * 7) % 11) as f64 / 11.0)).collect();
            let ss: BTreeMap<NodeId, f64> = (0..5).map(|s| (NodeId(s), (s % 2) as f64)).collect();
            for r in [
                rank_by_probability("a", &ids, &sc).unwrap(),
                rank_farm_star(&ids, &sc, &sc).unwrap(),
                rank_random(&ids, RandomMode::Dummy, &stmt, seed).unwrap(),
                rank_random(&ids, RandomMode::Spread, &stmt, seed).unwrap(),
                rank_defect_prediction(&ids, &stmt, &ss, seed).unwrap(),
            ] {
                prop_assert!(is_permutation(&r.order, &ids));
            }
        }
    }
}
