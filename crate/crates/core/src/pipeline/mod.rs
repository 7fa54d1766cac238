//! End-to-end experiment: parse, mutate, deduplicate, execute, extract
//! features, cross-validate the classifiers and evaluate every strategy.

pub mod config;
pub mod store;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, LabelMode};
pub use store::Store;

use crate::corpus::{check_lint, lint_corpus, load_corpus, CorpusEntry, LintEntry};
use crate::error::{Error, Result};
use crate::eval::report::{budget_point, ApfdRecord, ClassRow, GainRow, Population, SelectionRow, CURVE_GRID};
use crate::eval::{
    feature_information_gain, kfold_split, rep_seed, roc_auc, simulate_prioritization, simulate_selection,
    subsuming_set, top_k_metrics, EvalReport, FoldPlan, KillSets, PrioritizationRun, SelectionOutcome,
};
use crate::exec::{build_kill_matrix, KillMatrix};
use crate::features::{fit_encoder, Encoding, FeatureContext, RawFeatureRecord};
use crate::frontend::{build_cfg, Analysis};
use crate::gbdt::{train, BoostedModel, Loss};
use crate::mutation::{enumerate_mutants, manifest::manifest_string, Mutant};
use crate::rng::derive_u64;
use crate::strategies::{
    complexity_scores, filter_operator_set, rank_by_probability, rank_defect_prediction, rank_farm_star, rank_random,
    truncate_top, Budget, OperatorSet, RandomMode, Ranking, Strategy,
};
use crate::tce::{dedup_mutants, write_report};

/// Everything the evaluation needs from one faulty version.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProgramData {
    pub id: String,
    pub group: String,
    /// All enumerated mutants with their TCE status.
    pub mutants: Vec<Mutant>,
    /// Rows are the live mutants, in id order.
    pub matrix: KillMatrix,
    /// Raw features of the live mutants, aligned with matrix rows.
    pub features: Vec<RawFeatureRecord>,
}

impl ProgramData {
    pub fn live(&self) -> Vec<&Mutant> {
        self.mutants.iter().filter(|m| m.tce.is_live()).collect()
    }

    pub fn killable_labels(&self) -> Vec<bool> {
        (0..self.matrix.n_mutants()).map(|r| self.matrix.is_killable(r)).collect()
    }

    /// Fault-revealing ratio per row; unkilled mutants count as 0.
    pub fn fr_ratios(&self) -> Vec<f64> {
        (0..self.matrix.n_mutants())
            .map(|r| self.matrix.fault_revealing_ratio(r).unwrap_or(0.0))
            .collect()
    }

    pub fn fr_labels(&self) -> Vec<bool> {
        self.fr_ratios().iter().map(|&r| r == 1.0).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRun {
    pub stage: &'static str,
    pub item: String,
    pub cached: bool,
}

fn json<T: Serialize>(v: &T) -> Vec<u8> {
    serde_json::to_vec(v).expect("serializable")
}

/// Mutate, deduplicate, execute and extract features for one entry,
/// reusing cached stage outputs whose inputs are unchanged.
pub fn prepare_program(
    entry: &CorpusEntry,
    cfg: &ExperimentConfig,
    store: &Store,
    runs: &mut Vec<StageRun>,
) -> Result<ProgramData> {
    let faulty = entry.faulty()?;
    let correct = entry.correct()?;
    let mut record = |stage, cached| {
        runs.push(StageRun {
            stage,
            item: entry.id.clone(),
            cached,
        })
    };

    let mutate_key = store::key_of(&[
        b"mutate",
        env!("CARGO_PKG_VERSION").as_bytes(),
        entry.id.as_bytes(),
        entry.faulty_src.as_bytes(),
    ]);
    let mutants: Vec<Mutant> = match store.cached("mutate", &entry.id, &mutate_key) {
        Some(m) => {
            record("mutate", true);
            m
        }
        None => {
            let m = enumerate_mutants(&entry.id, &faulty, &build_cfg(&faulty));
            store.store_cache("mutate", &entry.id, &mutate_key, &m)?;
            record("mutate", false);
            m
        }
    };

    let tce_key = store::key_of(&[b"tce", mutate_key.as_bytes()]);
    let mutants: Vec<Mutant> = match store.cached("tce", &entry.id, &tce_key) {
        Some(m) => {
            record("tce", true);
            m
        }
        None => {
            let mut m = mutants;
            dedup_mutants(&faulty, &mut m);
            store.store_cache("tce", &entry.id, &tce_key, &m)?;
            record("tce", false);
            m
        }
    };
    let live: Vec<Mutant> = mutants.iter().filter(|m| m.tce.is_live()).cloned().collect();

    let exec_key = store::key_of(&[
        b"exec",
        tce_key.as_bytes(),
        entry.correct_src.as_bytes(),
        &json(&entry.tests),
        &json(&cfg.exec),
    ]);
    let matrix: KillMatrix = match store.cached("exec", &entry.id, &exec_key) {
        Some(m) => {
            record("exec", true);
            m
        }
        None => {
            let m = build_kill_matrix(&faulty, &correct, &live, &entry.tests, &cfg.exec);
            store.store_cache("exec", &entry.id, &exec_key, &m)?;
            record("exec", false);
            m
        }
    };

    let features_key = store::key_of(&[b"features", tce_key.as_bytes()]);
    let features: Vec<RawFeatureRecord> = match store.cached("features", &entry.id, &features_key) {
        Some(f) => {
            record("features", true);
            f
        }
        None => {
            let an = Analysis::new(faulty);
            let ctx = FeatureContext::new(&an, &mutants);
            let f: Vec<RawFeatureRecord> = live.iter().map(|m| ctx.extract(m)).collect();
            store.store_cache("features", &entry.id, &features_key, &f)?;
            record("features", false);
            f
        }
    };

    Ok(ProgramData {
        id: entry.id.clone(),
        group: entry.group.clone(),
        mutants,
        matrix,
        features,
    })
}

/// Predicted probabilities for the live mutants of one program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    pub ids: Vec<usize>,
    pub kill: Vec<f64>,
    pub fr: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoldModels {
    pub encoding: Encoding,
    pub killable: BoostedModel,
    pub fault_revealing: BoostedModel,
    pub warnings: Vec<String>,
}

/// Train both classifiers on `training` and predict every program in
/// `testing`.
pub fn train_and_predict(
    training: &[&ProgramData],
    testing: &[&ProgramData],
    cfg: &ExperimentConfig,
    fold: usize,
) -> Result<(FoldModels, Vec<Predictions>)> {
    let records: Vec<RawFeatureRecord> = training.iter().flat_map(|p| p.features.iter().cloned()).collect();
    if records.is_empty() {
        return Err(Error::stage("train", format!("fold {fold} has no training mutants")));
    }
    let enc = fit_encoder(&records);
    let hash = enc.schema_hash();
    let x: Vec<Vec<f64>> = records.iter().map(|r| enc.encode(r)).collect();
    let kill_y: Vec<f64> = training
        .iter()
        .flat_map(|p| p.killable_labels())
        .map(|b| f64::from(u8::from(b)))
        .collect();
    let fr_y: Vec<f64> = match cfg.label_mode {
        LabelMode::Binary => training
            .iter()
            .flat_map(|p| p.fr_labels())
            .map(|b| f64::from(u8::from(b)))
            .collect(),
        LabelMode::Ratio => training.iter().flat_map(|p| p.fr_ratios()).collect(),
    };
    let mut kcfg = cfg.gbdt.clone();
    kcfg.loss = Loss::BinaryLogistic;
    kcfg.seed = derive_u64(cfg.seed, "train/killable", fold as u64);
    let mut fcfg = cfg.gbdt.clone();
    fcfg.loss = match cfg.label_mode {
        LabelMode::Binary => Loss::BinaryLogistic,
        LabelMode::Ratio => Loss::SquaredOnRatio,
    };
    fcfg.seed = derive_u64(cfg.seed, "train/fault-revealing", fold as u64);
    let (killable, kr) = train(&x, &kill_y, &kcfg, &hash)?;
    let (fault_revealing, fr) = train(&x, &fr_y, &fcfg, &hash)?;
    let mut preds = Vec::new();
    for p in testing {
        let rows: Vec<Vec<f64>> = p.features.iter().map(|r| enc.encode(r)).collect();
        let kill = rows
            .iter()
            .map(|r| killable.predict_checked(&hash, r))
            .collect::<Result<Vec<_>, _>>()?;
        let frp = rows
            .iter()
            .map(|r| fault_revealing.predict_checked(&hash, r))
            .collect::<Result<Vec<_>, _>>()?;
        preds.push(Predictions {
            ids: p.matrix.mutant_ids.clone(),
            kill,
            fr: frp,
        });
    }
    let warnings = kr.warnings.into_iter().chain(fr.warnings).collect();
    Ok((
        FoldModels {
            encoding: enc,
            killable,
            fault_revealing,
            warnings,
        },
        preds,
    ))
}

fn score_map(ids: &[usize], v: &[f64]) -> BTreeMap<usize, f64> {
    ids.iter().copied().zip(v.iter().copied()).collect()
}

/// Rankings of every configured strategy for one program. `all` holds
/// every enumerated mutant, `pred` covers the live ones, and `truth` gives
/// their true fault-revealing ratios for the oracle. `index` seeds the
/// stochastic strategies.
pub fn rank_program(
    all: &[Mutant],
    pred: &Predictions,
    truth: Option<&[f64]>,
    strategies: &[Strategy],
    seed: u64,
    index: usize,
    rep: usize,
) -> Result<BTreeMap<Strategy, Ranking>> {
    let ids = &pred.ids;
    let live: Vec<Mutant> = all.iter().filter(|m| m.tce.is_live()).cloned().collect();
    let stmt_of: BTreeMap<usize, _> = live.iter().map(|m| (m.id, m.stmt)).collect();
    let kill = score_map(ids, &pred.kill);
    let fr = score_map(ids, &pred.fr);
    let stage = |e: crate::strategies::StrategyError| Error::stage("rank", e);
    let s = |name: &str| rep_seed(derive_u64(seed, &format!("rank/{name}"), index as u64), rep);
    let mut out = BTreeMap::new();
    for &st in strategies {
        let r = match st {
            Strategy::Farm => rank_by_probability(st.name(), ids, &fr).map_err(stage)?,
            Strategy::FarmStar => rank_farm_star(ids, &kill, &fr).map_err(stage)?,
            Strategy::PredKillable => rank_by_probability(st.name(), ids, &kill).map_err(stage)?,
            Strategy::DummyRandom => rank_random(ids, RandomMode::Dummy, &stmt_of, s(st.name())).map_err(stage)?,
            Strategy::SpreadRandom => rank_random(ids, RandomMode::Spread, &stmt_of, s(st.name())).map_err(stage)?,
            Strategy::Sdl | Strategy::ESelective => {
                let set = if st == Strategy::Sdl {
                    OperatorSet::Sdl
                } else {
                    OperatorSet::ESelective
                };
                let subset = filter_operator_set(&live, set);
                let mut r = rank_random(&subset, RandomMode::Dummy, &stmt_of, s(st.name())).map_err(stage)?;
                r.strategy = st.name().to_string();
                r
            }
            Strategy::DefectPrediction => {
                rank_defect_prediction(ids, &stmt_of, &complexity_scores(all), s(st.name())).map_err(stage)?
            }
            Strategy::Oracle => {
                let truth = truth.ok_or_else(|| Error::Usage("the oracle strategy needs a kill matrix".into()))?;
                rank_by_probability(st.name(), ids, &score_map(ids, truth)).map_err(stage)?
            }
        };
        out.insert(st, r);
    }
    Ok(out)
}

/// Whether a strategy ranks every live mutant.
pub fn is_complete(s: Strategy) -> bool {
    !matches!(s, Strategy::Sdl | Strategy::ESelective)
}

/// Strategy pairs compared in the statistics table.
pub fn comparison_pairs(strategies: &[Strategy]) -> Vec<(Strategy, Strategy)> {
    let complete: Vec<Strategy> = strategies.iter().copied().filter(|s| is_complete(*s)).collect();
    let mut pairs = Vec::new();
    for a in [Strategy::Farm, Strategy::FarmStar, Strategy::Oracle] {
        if !complete.contains(&a) {
            continue;
        }
        for &b in &complete {
            if b != a && !pairs.contains(&(b, a)) {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

pub struct CvOutput {
    pub plan: FoldPlan,
    pub report: EvalReport,
    pub predictions: BTreeMap<String, Predictions>,
    pub rankings: BTreeMap<String, BTreeMap<Strategy, Ranking>>,
    pub models: Vec<FoldModels>,
}

fn budget_grid(cfg: &ExperimentConfig) -> Vec<f64> {
    let mut g: Vec<f64> = cfg.budgets.iter().chain(CURVE_GRID.iter()).copied().collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Evaluate one program's rankings into the report. Only the kill matrix
/// is consulted, so externally produced matrices work too.
/// Redraws the ranking of a seeded strategy for one repetition.
pub type Redraw<'a> = &'a dyn Fn(Strategy, usize) -> Result<Ranking>;

/// Simulate every ranking of one program. With `redraw`, seeded strategies
/// get a fresh ranking per repetition; the given ranking is repetition 0.
pub fn evaluate_program(
    report: &mut EvalReport,
    id: &str,
    matrix: &KillMatrix,
    index: usize,
    rankings: &BTreeMap<Strategy, Ranking>,
    redraw: Option<Redraw>,
    cfg: &ExperimentConfig,
) -> Result<()> {
    let ks = KillSets::new(matrix);
    let subsuming = subsuming_set(&ks);
    let mut mask = vec![false; ks.n_mutants()];
    for &r in &subsuming {
        mask[r] = true;
    }
    let pop = Population {
        mutants: ks.n_mutants(),
        killable: ks.n_killable(),
        subsuming: subsuming.len(),
    };
    let row_of: BTreeMap<usize, usize> = matrix.mutant_ids.iter().enumerate().map(|(r, &id)| (id, r)).collect();
    let rows = |ids: &[usize]| -> Result<Vec<usize>> {
        ids.iter()
            .map(|m| {
                row_of
                    .get(m)
                    .copied()
                    .ok_or_else(|| Error::stage("evaluate", format!("{id}: mutant {m} is not in the kill matrix")))
            })
            .collect()
    };
    let sim_seed = derive_u64(cfg.seed, "simulate", index as u64);
    let sel_seed = derive_u64(cfg.seed, "select", index as u64);
    let stage = |e: crate::eval::EvalError| Error::stage("evaluate", e);
    let grid = budget_grid(cfg);
    let sdl_size = rankings.get(&Strategy::Sdl).map(|r| r.len());

    for (&st, ranking) in rankings {
        let complete = is_complete(st);
        if ranking.is_empty() {
            log::warn!("{id}: {} selects no mutants", st.name());
            continue;
        }
        let per_rep: Vec<Ranking> = match redraw {
            Some(f) if ranking.seed.is_some() => std::iter::once(Ok(ranking.clone()))
                .chain((1..cfg.repetitions).map(|r| f(st, r)))
                .collect::<Result<_>>()?,
            _ => vec![ranking.clone()],
        };
        let orders: Vec<Vec<usize>> = per_rep.iter().map(|r| rows(&r.order)).collect::<Result<_>>()?;
        let runs: Vec<PrioritizationRun> = if orders.len() == 1 {
            simulate_prioritization(&ks, &orders[0], &mask, cfg.repetitions, sim_seed).map_err(stage)?
        } else {
            let mut runs = Vec::with_capacity(orders.len());
            for (r, order) in orders.iter().enumerate() {
                runs.extend(simulate_prioritization(&ks, order, &mask, 1, rep_seed(sim_seed, r)).map_err(stage)?);
            }
            runs
        };
        report
            .apfd
            .push(ApfdRecord::new(st.name(), id, &runs, ranking.len(), complete));
        for &pct in &grid {
            report.points.push(budget_point(st.name(), id, &runs, pct, pop, complete));
        }
        let mut budgets: Vec<(String, Budget)> = if complete {
            cfg.budgets.iter().map(|&b| (format!("{b}%"), Budget::Percent(b))).collect()
        } else {
            vec![("all".to_string(), Budget::Count(ranking.len()))]
        };
        if complete && st != Strategy::Oracle {
            if let Some(n) = sdl_size.filter(|&n| n > 0) {
                budgets.push(("sdl-size".to_string(), Budget::Count(n)));
            }
        }
        for (label, budget) in budgets {
            let select = |r: &Ranking| truncate_top(r, budget).map_err(|e| Error::stage("select", e));
            let selected = select(ranking)?;
            let out = if per_rep.len() == 1 {
                simulate_selection(&ks, &rows(&selected)?, cfg.repetitions, sel_seed).map_err(stage)?
            } else {
                let mut sum = SelectionOutcome {
                    probability: 0.0,
                    mean_analysed: 0.0,
                    mean_tests: 0.0,
                };
                for (r, ranking) in per_rep.iter().enumerate() {
                    let o = simulate_selection(&ks, &rows(&select(ranking)?)?, 1, rep_seed(sel_seed, r)).map_err(stage)?;
                    sum.probability += o.probability;
                    sum.mean_analysed += o.mean_analysed;
                    sum.mean_tests += o.mean_tests;
                }
                let n = per_rep.len() as f64;
                SelectionOutcome {
                    probability: sum.probability / n,
                    mean_analysed: sum.mean_analysed / n,
                    mean_tests: sum.mean_tests / n,
                }
            };
            report.selection.push(SelectionRow {
                strategy: st.name().to_string(),
                program: id.to_string(),
                budget: label,
                selected: selected.len(),
                fault_revelation: out.probability,
                mean_analysed: out.mean_analysed,
                mean_tests: out.mean_tests,
            });
        }
    }
    Ok(())
}

/// Grouped k-fold cross-validation over prepared programs.
pub fn cross_validate(programs: &[ProgramData], cfg: &ExperimentConfig) -> Result<CvOutput> {
    let keyed: Vec<(String, String)> = programs.iter().map(|p| (p.id.clone(), p.group.clone())).collect();
    let plan = kfold_split(&keyed, cfg.k, derive_u64(cfg.seed, "kfold", 0)).map_err(|e| Error::stage("crossval", e))?;
    let index_of: BTreeMap<&str, usize> = programs.iter().enumerate().map(|(i, p)| (p.id.as_str(), i)).collect();
    let mut report = EvalReport::default();
    let mut predictions = BTreeMap::new();
    let mut rankings = BTreeMap::new();
    let mut models = Vec::new();
    for (fold, ids) in plan.folds.iter().enumerate() {
        let testing: Vec<&ProgramData> = ids.iter().map(|id| &programs[index_of[id.as_str()]]).collect();
        let training: Vec<&ProgramData> = plan.training(fold).iter().map(|id| &programs[index_of[id.as_str()]]).collect();
        log::info!("fold {fold}: training on {} programs", training.len());
        let (m, preds) = train_and_predict(&training, &testing, cfg, fold)?;
        for w in &m.warnings {
            log::warn!("fold {fold}: {w}");
        }
        for (p, pred) in testing.iter().zip(preds) {
            let labels_k = p.killable_labels();
            let labels_f = p.fr_labels();
            for &pct in &cfg.budgets {
                for (target, scores, labels) in [("killable", &pred.kill, &labels_k), ("fault_revealing", &pred.fr, &labels_f)] {
                    let c = top_k_metrics(scores, labels, pct);
                    report.classification.push(ClassRow {
                        fold,
                        program: p.id.clone(),
                        target: target.to_string(),
                        top_pct: pct,
                        precision: c.precision,
                        recall: c.recall,
                        f1: c.f1,
                        auc: roc_auc(scores, labels),
                    });
                }
            }
            let idx = index_of[p.id.as_str()];
            let truth = p.fr_ratios();
            let r = rank_program(&p.mutants, &pred, Some(&truth), &cfg.strategies, cfg.seed, idx, 0)?;
            rankings.insert(p.id.clone(), r);
            predictions.insert(p.id.clone(), pred);
        }
        models.push(m);
    }
    for p in programs {
        let idx = index_of[p.id.as_str()];
        let truth = p.fr_ratios();
        let redraw = |st: Strategy, rep: usize| -> Result<Ranking> {
            let mut r = rank_program(&p.mutants, &predictions[&p.id], Some(&truth), &[st], cfg.seed, idx, rep)?;
            Ok(r.remove(&st).expect("requested strategy"))
        };
        evaluate_program(&mut report, &p.id, &p.matrix, idx, &rankings[&p.id], Some(&redraw), cfg)?;
    }
    let records: Vec<RawFeatureRecord> = programs.iter().flat_map(|p| p.features.iter().cloned()).collect();
    for (target, labels) in [
        ("killable", programs.iter().flat_map(|p| p.killable_labels()).collect::<Vec<_>>()),
        ("fault_revealing", programs.iter().flat_map(|p| p.fr_labels()).collect()),
    ] {
        for (feature, ig) in feature_information_gain(&records, &labels) {
            report.information_gain.push(GainRow {
                target: target.to_string(),
                feature,
                information_gain: ig,
            });
        }
    }
    let budgets: Vec<f64> = cfg.budgets.clone();
    for (a, b) in comparison_pairs(&cfg.strategies) {
        report
            .compare(a.name(), b.name(), &budgets)
            .map_err(|e| Error::stage("stats", e))?;
    }
    Ok(CvOutput {
        plan,
        report,
        predictions,
        rankings,
        models,
    })
}

pub struct PipelineOutcome {
    pub lint: Vec<LintEntry>,
    pub programs: Vec<ProgramData>,
    pub cv: CvOutput,
    /// Report CSVs in a fixed order.
    pub report_files: Vec<(&'static str, String)>,
    pub stage_runs: Vec<StageRun>,
    pub artifacts: BTreeMap<String, String>,
}

fn csv_string(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Error::stage("store", e))?;
    Ok(buf)
}

/// Run the whole experiment, writing artifacts under `out`.
pub fn run_pipeline(cfg: &ExperimentConfig, out: &Path) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let entries = load_corpus(&cfg.corpus)?;
    let lint = lint_corpus(&entries, cfg.threshold, &cfg.exec);
    check_lint(&lint)?;
    let mut store = Store::new(out);
    store.write("config.toml", cfg.to_toml().as_bytes())?;
    store.write(
        "lint.csv",
        &csv_string(|b| {
            let mut w = csv::Writer::from_writer(b);
            for e in &lint {
                w.serialize((&e.id, e.tests, e.revealing))?;
            }
            w.flush()?;
            Ok(())
        })?,
    )?;

    let mut stage_runs = Vec::new();
    let mut programs = Vec::new();
    for e in &entries {
        log::info!("preparing {}", e.id);
        let p = prepare_program(e, cfg, &store, &mut stage_runs)?;
        let dir = format!("programs/{}", p.id);
        store.write(&format!("{dir}/mutants.csv"), manifest_string(&p.mutants).as_bytes())?;
        store.write(&format!("{dir}/tce.csv"), &csv_string(|b| write_report(b, &p.mutants))?)?;
        store.write(&format!("{dir}/matrix.csv"), &csv_string(|b| p.matrix.export(b))?)?;
        store.write(&format!("{dir}/matrix_tests.csv"), &csv_string(|b| p.matrix.export_tests(b))?)?;
        store.write(&format!("{dir}/matrix_costs.csv"), &csv_string(|b| p.matrix.export_costs(b))?)?;
        programs.push(p);
    }
    let all: Vec<RawFeatureRecord> = programs.iter().flat_map(|p| p.features.iter().cloned()).collect();
    if !all.is_empty() {
        let enc = fit_encoder(&all);
        store.write("features/encoding.json", &json(&enc))?;
        store.write(
            "features/features.csv",
            &csv_string(|b| crate::features::write_matrix(b, &enc, &all))?,
        )?;
    }

    log::info!("cross-validating {} programs", programs.len());
    let cv = cross_validate(&programs, cfg)?;
    stage_runs.push(StageRun {
        stage: "crossval",
        item: "corpus".into(),
        cached: false,
    });
    store.write("folds.json", &json(&cv.plan))?;
    for (i, m) in cv.models.iter().enumerate() {
        store.write(&format!("models/fold{i}-killable.json"), m.killable.to_json().as_bytes())?;
        store.write(
            &format!("models/fold{i}-fault-revealing.json"),
            m.fault_revealing.to_json().as_bytes(),
        )?;
    }
    for (id, rs) in &cv.rankings {
        for (st, r) in rs {
            store.write(&format!("rankings/{}/{id}.csv", st.name()), &csv_string(|b| r.write_csv(b))?)?;
        }
    }
    let report_files = cv.report.csv_files().map_err(|e| Error::stage("report", e))?;
    for (name, text) in &report_files {
        store.write(&format!("report/{name}"), text.as_bytes())?;
    }
    store.write_manifest()?;
    Ok(PipelineOutcome {
        lint,
        programs,
        artifacts: store.hashes().clone(),
        cv,
        report_files,
        stage_runs,
    })
}
