//! Report tables, cost-aligned comparisons and CSV bundles.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::classify::top_count;
use super::sim::PrioritizationRun;
use super::stats::{median, vargha_delaney_a12, wilcoxon_ranksum, Method};
use super::EvalError;

/// Percent grid of the aggregate curves.
pub const CURVE_GRID: [f64; 14] = [1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 100.0];

/// One strategy on one program once a fixed number of mutants is analysed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetPoint {
    pub strategy: String,
    pub program: String,
    pub budget_pct: f64,
    pub analysed_budget: usize,
    /// The strategy ran out of mutants before the budget in some repetition.
    pub short: bool,
    pub fault_revelation: f64,
    pub mutation_score: f64,
    pub subsuming_score: f64,
    pub equivalent_ratio: f64,
    pub tests: f64,
}

/// Population sizes a budget point is measured against.
#[derive(Clone, Copy, Debug)]
pub struct Population {
    pub mutants: usize,
    pub killable: usize,
    pub subsuming: usize,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

fn ratio(a: u32, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        f64::from(a) / b as f64
    }
}

/// Summarise prioritization runs at `budget_pct` of the population.
/// `complete` says the ranking holds every live mutant, so a run that ends
/// early has nothing left to analyse.
pub fn budget_point(
    strategy: &str,
    program: &str,
    runs: &[PrioritizationRun],
    budget_pct: f64,
    pop: Population,
    complete: bool,
) -> BudgetPoint {
    let analysed_budget = top_count(budget_pct, pop.mutants).max(1);
    let at: Vec<_> = runs.iter().filter_map(|r| r.at(analysed_budget).map(|s| (r, s))).collect();
    BudgetPoint {
        strategy: strategy.to_string(),
        program: program.to_string(),
        budget_pct,
        analysed_budget,
        short: !complete && runs.iter().any(|r| r.steps.len() < analysed_budget),
        fault_revelation: mean(runs.iter().map(|r| f64::from(u8::from(r.revealed_within(analysed_budget))))),
        mutation_score: mean(at.iter().map(|(_, s)| ratio(s.killed, pop.killable))),
        subsuming_score: mean(at.iter().map(|(_, s)| ratio(s.subsuming_killed, pop.subsuming))),
        equivalent_ratio: mean(at.iter().map(|(r, s)| ratio(s.equivalent, analysed_budget.min(r.steps.len())))),
        tests: mean(at.iter().map(|(_, s)| f64::from(s.tests))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApfdRecord {
    pub strategy: String,
    pub program: String,
    /// Ranking length.
    pub population: usize,
    pub complete: bool,
    pub apfd: Vec<f64>,
    /// Repetitions that never revealed the fault.
    pub floored: Vec<bool>,
}

impl ApfdRecord {
    pub fn new(strategy: &str, program: &str, runs: &[PrioritizationRun], population: usize, complete: bool) -> Self {
        ApfdRecord {
            strategy: strategy.to_string(),
            program: program.to_string(),
            population,
            complete,
            apfd: runs.iter().map(|r| r.apfd).collect(),
            floored: runs.iter().map(|r| r.floored).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatRow {
    pub metric: String,
    pub budget_pct: Option<f64>,
    pub strategy_a: String,
    pub strategy_b: String,
    pub n: usize,
    pub median_a: f64,
    pub median_b: f64,
    pub p: f64,
    pub a12: f64,
    pub method: Method,
}

fn stat_row(metric: &str, budget_pct: Option<f64>, a: &str, b: &str, xa: &[f64], xb: &[f64]) -> StatRow {
    let w = wilcoxon_ranksum(xa, xb);
    StatRow {
        metric: metric.to_string(),
        budget_pct,
        strategy_a: a.to_string(),
        strategy_b: b.to_string(),
        n: xa.len(),
        median_a: median(xa).unwrap_or(f64::NAN),
        median_b: median(xb).unwrap_or(f64::NAN),
        p: w.p,
        a12: vargha_delaney_a12(xa, xb),
        method: w.method,
    }
}

fn misaligned(a: &str, b: &str, reason: String) -> EvalError {
    EvalError::Misaligned {
        a: a.to_string(),
        b: b.to_string(),
        reason,
    }
}

/// Wilcoxon and effect size of fault revelation between two strategies over
/// programs, at one percent budget. Every program must be measured for both
/// strategies at the same analysed-mutant count, and neither may run short.
pub fn compare_at_budget(points: &[BudgetPoint], a: &str, b: &str, budget_pct: f64) -> Result<StatRow, EvalError> {
    let pick = |s: &str| -> BTreeMap<&str, &BudgetPoint> {
        points
            .iter()
            .filter(|p| p.strategy == s && p.budget_pct == budget_pct)
            .map(|p| (p.program.as_str(), p))
            .collect()
    };
    let (pa, pb) = (pick(a), pick(b));
    if pa.is_empty() || pa.keys().collect::<BTreeSet<_>>() != pb.keys().collect::<BTreeSet<_>>() {
        return Err(misaligned(a, b, format!("different programs at {budget_pct}%")));
    }
    for (prog, x) in &pa {
        let y = pb[prog];
        if x.analysed_budget != y.analysed_budget {
            return Err(misaligned(
                a,
                b,
                format!("{prog}: {} vs {} analysed mutants", x.analysed_budget, y.analysed_budget),
            ));
        }
        if x.short || y.short {
            return Err(misaligned(a, b, format!("{prog}: budget {} not reached", x.analysed_budget)));
        }
    }
    let xa: Vec<f64> = pa.values().map(|p| p.fault_revelation).collect();
    let xb: Vec<f64> = pb.values().map(|p| p.fault_revelation).collect();
    Ok(stat_row("fault_revelation", Some(budget_pct), a, b, &xa, &xb))
}

/// APFD comparison over all (program, repetition) pairs. Both strategies
/// must rank every live mutant of each program.
pub fn compare_apfd(records: &[ApfdRecord], a: &str, b: &str) -> Result<StatRow, EvalError> {
    let pick = |s: &str| -> BTreeMap<&str, &ApfdRecord> {
        records.iter().filter(|r| r.strategy == s).map(|r| (r.program.as_str(), r)).collect()
    };
    let (ra, rb) = (pick(a), pick(b));
    if ra.is_empty() || ra.keys().collect::<BTreeSet<_>>() != rb.keys().collect::<BTreeSet<_>>() {
        return Err(misaligned(a, b, "different programs".into()));
    }
    let (mut xa, mut xb) = (Vec::new(), Vec::new());
    for (prog, x) in &ra {
        let y = rb[prog];
        if !x.complete || !y.complete || x.population != y.population {
            return Err(misaligned(a, b, format!("{prog}: rankings do not cover the same mutants")));
        }
        xa.extend(&x.apfd);
        xb.extend(&y.apfd);
    }
    Ok(stat_row("apfd", None, a, b, &xa, &xb))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub strategy: String,
    pub budget_pct: f64,
    pub median_fault_revelation: f64,
    pub median_mutation_score: f64,
    pub median_subsuming_score: f64,
    pub median_equivalent_ratio: f64,
}

/// Medians over programs per (strategy, budget).
pub fn curves(points: &[BudgetPoint]) -> Vec<CurveRow> {
    let mut groups: BTreeMap<(String, u64), Vec<&BudgetPoint>> = BTreeMap::new();
    for p in points {
        groups.entry((p.strategy.clone(), p.budget_pct.to_bits())).or_default().push(p);
    }
    let mut rows: Vec<CurveRow> = groups
        .into_iter()
        .map(|((strategy, bits), ps)| {
            let med = |f: fn(&BudgetPoint) -> f64| median(&ps.iter().map(|p| f(p)).collect::<Vec<_>>()).unwrap_or(0.0);
            CurveRow {
                strategy,
                budget_pct: f64::from_bits(bits),
                median_fault_revelation: med(|p| p.fault_revelation),
                median_mutation_score: med(|p| p.mutation_score),
                median_subsuming_score: med(|p| p.subsuming_score),
                median_equivalent_ratio: med(|p| p.equivalent_ratio),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.strategy.cmp(&b.strategy).then(a.budget_pct.total_cmp(&b.budget_pct)));
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionRow {
    pub strategy: String,
    pub program: String,
    pub budget: String,
    pub selected: usize,
    pub fault_revelation: f64,
    pub mean_analysed: f64,
    pub mean_tests: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRow {
    pub fold: usize,
    pub program: String,
    pub target: String,
    pub top_pct: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GainRow {
    pub target: String,
    pub feature: String,
    pub information_gain: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub apfd: Vec<ApfdRecord>,
    pub points: Vec<BudgetPoint>,
    pub selection: Vec<SelectionRow>,
    pub stats: Vec<StatRow>,
    pub classification: Vec<ClassRow>,
    pub information_gain: Vec<GainRow>,
}

fn to_csv<T: Serialize>(rows: &[T]) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row of `apfd.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApfdLine {
    pub strategy: String,
    pub program: String,
    pub population: usize,
    pub complete: bool,
    pub rep: usize,
    pub apfd: f64,
    pub floored: bool,
}

/// Regroup `apfd.csv` rows into records, in first-seen order.
pub fn apfd_records(lines: &[ApfdLine]) -> Vec<ApfdRecord> {
    let mut out: Vec<ApfdRecord> = Vec::new();
    for l in lines {
        match out.iter_mut().find(|r| r.strategy == l.strategy && r.program == l.program) {
            Some(r) => {
                r.apfd.push(l.apfd);
                r.floored.push(l.floored);
            }
            None => out.push(ApfdRecord {
                strategy: l.strategy.clone(),
                program: l.program.clone(),
                population: l.population,
                complete: l.complete,
                apfd: vec![l.apfd],
                floored: vec![l.floored],
            }),
        }
    }
    out
}

impl EvalReport {
    /// Add both comparisons of `a` against `b`; fails without touching the
    /// report when they are misaligned.
    pub fn compare(&mut self, a: &str, b: &str, budgets: &[f64]) -> Result<(), EvalError> {
        let mut rows = vec![compare_apfd(&self.apfd, a, b)?];
        for &pct in budgets {
            rows.push(compare_at_budget(&self.points, a, b, pct)?);
        }
        self.stats.extend(rows);
        Ok(())
    }

    /// CSV bundle as (file name, contents), in a fixed order.
    pub fn csv_files(&self) -> csv::Result<Vec<(&'static str, String)>> {
        let apfd: Vec<ApfdLine> = self
            .apfd
            .iter()
            .flat_map(|r| {
                r.apfd.iter().zip(&r.floored).enumerate().map(move |(rep, (&apfd, &floored))| ApfdLine {
                    strategy: r.strategy.clone(),
                    program: r.program.clone(),
                    population: r.population,
                    complete: r.complete,
                    rep,
                    apfd,
                    floored,
                })
            })
            .collect();
        Ok(vec![
            ("apfd.csv", to_csv(&apfd)?),
            ("fault_revelation.csv", to_csv(&self.points)?),
            ("curves.csv", to_csv(&curves(&self.points))?),
            ("selection.csv", to_csv(&self.selection)?),
            ("stats.csv", to_csv(&self.stats)?),
            ("classification.csv", to_csv(&self.classification)?),
            ("information_gain.csv", to_csv(&self.information_gain)?),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::sim::Step;

    fn run(k: Option<usize>, len: usize) -> PrioritizationRun {
        let steps = (0..len)
            .map(|i| Step {
                revealed: k.is_some_and(|k| i + 1 >= k),
                tests: i as u32 + 1,
                killed: i as u32 + 1,
                subsuming_killed: 0,
                equivalent: 0,
            })
            .collect();
        PrioritizationRun {
            k,
            apfd: 0.0,
            floored: k.is_none(),
            steps,
        }
    }

    const POP: Population = Population {
        mutants: 10,
        killable: 10,
        subsuming: 1,
    };

    #[test]
    fn budget_point_counts_revelations() {
        let p = budget_point("a", "p", &[run(Some(1), 10), run(Some(5), 10)], 20.0, POP, true);
        assert_eq!(p.analysed_budget, 2);
        assert_eq!(p.fault_revelation, 0.5);
        assert_eq!(p.mutation_score, 0.2);
        assert!(!p.short);
        let q = budget_point("s", "p", &[run(None, 1)], 20.0, POP, false);
        assert!(q.short);
    }

    #[test]
    fn misaligned_comparisons_are_rejected() {
        let full = budget_point("a", "p", &[run(Some(1), 10)], 20.0, POP, true);
        let short = budget_point("s", "p", &[run(None, 1)], 20.0, POP, false);
        let points = vec![full.clone(), short];
        assert!(matches!(compare_at_budget(&points, "a", "s", 20.0), Err(EvalError::Misaligned { .. })));
        let mut other = full.clone();
        other.strategy = "b".into();
        other.analysed_budget = 3;
        let points = vec![full.clone(), other.clone()];
        assert!(compare_at_budget(&points, "a", "b", 20.0).is_err());
        other.analysed_budget = 2;
        let points = vec![full, other];
        assert!(compare_at_budget(&points, "a", "b", 20.0).is_ok());
    }

    #[test]
    fn report_compare_is_atomic() {
        let rs = [run(Some(1), 10)];
        let mut report = EvalReport {
            apfd: vec![ApfdRecord::new("a", "p", &rs, 10, true), ApfdRecord::new("b", "p", &rs, 10, true)],
            points: vec![budget_point("a", "p", &rs, 20.0, POP, true)],
            ..Default::default()
        };
        assert!(report.compare("a", "b", &[20.0]).is_err());
        assert!(report.stats.is_empty());
        assert!(report.compare("a", "b", &[]).is_ok());
        assert_eq!(report.stats.len(), 1);
        assert_eq!(report.csv_files().unwrap().len(), 7);
    }
}
