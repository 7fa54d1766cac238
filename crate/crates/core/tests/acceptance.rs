//! Acceptance criteria, one PASS/FAIL line each.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mutsel::corpus::load_corpus;
use mutsel::eval::report::{compare_apfd, compare_at_budget, ApfdRecord};
use mutsel::eval::{simulate_selection, subsuming_set, vargha_delaney_a12, wilcoxon_ranksum, KillSets};
use mutsel::exec::{run_program, ExecConfig};
use mutsel::features::extract_all;
use mutsel::frontend::{build_cfg, Analysis};
use mutsel::gbdt::{logistic_gradient, logistic_loss, sigmoid, train, GbdtConfig};
use mutsel::mutation::{apply_mutant, enumerate_mutants, TceStatus};
use mutsel::pipeline::{run_pipeline, ExperimentConfig, PipelineOutcome};
use mutsel::strategies::Strategy;
use mutsel::tce::dedup_mutants;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:.2?}, limit {limit:?}"))
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn worked_example() -> Check {
    let start = Instant::now();
    let an = Analysis::from_source(&std::fs::read_to_string(data("rotate_queries.mc")).unwrap()).unwrap();
    let ms = enumerate_mutants("rotate", &an.program, &an.cfg);
    let rs = extract_all(&an, &ms);
    let i = ms
        .iter()
        .position(|m| m.span.line == 48 && m.type_string == "()-- → ()++")
        .ok_or("decrement swap not enumerated")?;
    let r = &rs[i];
    for (name, v) in [
        ("Complexity", 72.0),
        ("CfgDepth", 1.0),
        ("CfgPredNum", 2.0),
        ("CfgSuccNum", 2.0),
        ("AstNumParents", 1.0),
        ("NumOutCtrlDeps", 0.0),
        ("NumInCtrlDeps", 0.0),
        ("AstParentsNumInCtrlDeps", 0.0),
    ] {
        ensure(r.numeric(name) == v, format!("{name} = {}, expected {v}", r.numeric(name)))?;
    }
    for (name, v) in [
        ("TypeMutant", "()-- → ()++"),
        ("TypeStmtBB", "While Condition"),
        ("DataTypesOfOperands", "int"),
        ("DataTypeOfValue", "int"),
    ] {
        ensure(r.category(name) == v, format!("{name} = {:?}, expected {v:?}", r.category(name)))?;
    }
    for (name, v) in [
        ("AstChildHasIdentifier", true),
        ("AstChildHasLiteral", false),
        ("AstChildHasOperator", true),
    ] {
        ensure(r.boolean(name) == v, format!("{name} = {}, expected {v}", r.boolean(name)))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("all stated values reproduced in {:.2?}", start.elapsed()))
}

/// Exact probability that the random tester reveals the fault, by recursion
/// over the set of remaining mutants.
fn exact_selection(killers: &[Vec<usize>], revealing: &[bool], pool: u32) -> f64 {
    if pool == 0 {
        return 0.0;
    }
    let members: Vec<usize> = (0..killers.len()).filter(|m| pool & (1 << m) != 0).collect();
    let mut total = 0.0;
    for &m in &members {
        if killers[m].is_empty() {
            total += exact_selection(killers, revealing, pool & !(1 << m));
            continue;
        }
        let mut sub = 0.0;
        for &t in &killers[m] {
            if revealing[t] {
                sub += 1.0;
            } else {
                let mut rest = pool;
                for (v, k) in killers.iter().enumerate() {
                    if k.contains(&t) {
                        rest &= !(1 << v);
                    }
                }
                sub += exact_selection(killers, revealing, rest);
            }
        }
        total += sub / killers[m].len() as f64;
    }
    total / members.len() as f64
}

fn simulation_oracle() -> Check {
    let start = Instant::now();
    let mut cases: Vec<(Vec<Vec<usize>>, Vec<bool>)> = vec![
        (vec![vec![0]], vec![true]),
        (vec![vec![0], vec![1]], vec![false, true]),
        (vec![vec![0, 1], vec![1]], vec![true, false]),
        (vec![vec![], vec![0]], vec![true]),
        (vec![vec![0, 1, 2], vec![2], vec![], vec![1, 3]], vec![false, false, true, false]),
        (vec![vec![0, 1, 2, 3], vec![0], vec![1], vec![2]], vec![false, false, false, true]),
        (vec![vec![3], vec![3], vec![0, 1], vec![2]], vec![true, false, false, false]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    while cases.len() < 60 {
        let (m, t) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let killers = (0..m).map(|_| (0..t).filter(|_| rng.gen_bool(0.4)).collect()).collect();
        let revealing = (0..t).map(|_| rng.gen_bool(0.3)).collect();
        cases.push((killers, revealing));
    }
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (c, (killers, revealing)) in cases.iter().enumerate() {
        let ks = KillSets::from_killers(killers.clone(), revealing.clone());
        let m = killers.len();
        for subset in 1u32..(1 << m) {
            let selected: Vec<usize> = (0..m).filter(|r| subset & (1 << r) != 0).collect();
            let got = simulate_selection(&ks, &selected, 10_000, c as u64 * 16 + subset as u64).unwrap();
            let want = exact_selection(killers, revealing, subset);
            let err = (got.probability - want).abs();
            worst = worst.max(err);
            checked += 1;
            ensure(err <= 0.02, format!("matrix {c} subset {subset:b}: {} vs exact {want}", got.probability))?;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{checked} selections, worst deviation {worst:.4} in {:.2?}", start.elapsed()))
}

/// Doubled midranks computed by counting smaller and equal values.
fn doubled_ranks(v: &[f64]) -> Vec<i64> {
    v.iter()
        .map(|&x| {
            let below = v.iter().filter(|&&y| y < x).count() as i64;
            let equal = v.iter().filter(|&&y| y == x).count() as i64;
            2 * below + equal + 1
        })
        .collect()
}

fn brute_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_ranks(&pooled);
    let (n, m) = (pooled.len(), a.len());
    let mean = (m * (n + 1)) as i64;
    let obs = (ranks[..m].iter().sum::<i64>() - mean).abs();
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let w: i64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        total += 1;
        extreme += u64::from((w - mean).abs() >= obs);
    }
    extreme as f64 / total as f64
}

/// A12 from the rank sum of the first sample.
fn rank_a12(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let r: i64 = doubled_ranks(&pooled)[..a.len()].iter().sum();
    let (m, n) = (a.len() as f64, b.len() as f64);
    (r as f64 / 2.0 / m - (m + 1.0) / 2.0) / n
}

fn statistics() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_p, mut worst_a, mut pairs) = (0.0f64, 0.0f64, 0);
    for na in 1..=8 {
        for nb in 1..=8 {
            for trial in 0..4 {
                let levels = [3, 6, 50, 1000][trial];
                let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.gen_range(0..levels) as f64 / 4.0).collect() };
                let (a, b) = (draw(na), draw(nb));
                let got = wilcoxon_ranksum(&a, &b);
                let dp = (got.p - brute_p(&a, &b)).abs();
                let da = (vargha_delaney_a12(&a, &b) - rank_a12(&a, &b)).abs();
                worst_p = worst_p.max(dp);
                worst_a = worst_a.max(da);
                pairs += 1;
                ensure(dp <= 1e-6, format!("p mismatch {dp} on {a:?} vs {b:?}"))?;
                ensure(da <= 1e-9, format!("A12 mismatch {da} on {a:?} vs {b:?}"))?;
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{pairs} sample pairs, worst |dp| {worst_p:.1e}, worst |dA12| {worst_a:.1e} in {:.2?}",
        start.elapsed()
    ))
}

fn gbdt_gradients() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x: Vec<Vec<f64>> = (0..100).map(|_| (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|r| f64::from(u8::from(r[0] + 0.5 * r[1] + rng.gen_range(-0.5..0.5) > 0.0)))
        .collect();
    let small = GbdtConfig {
        trees: 10,
        depth: 3,
        subsample: 1.0,
        ..GbdtConfig::default()
    };
    let (model, _) = train(&x, &y, &small, "s").map_err(|e| e.to_string())?;
    let h = 1e-6;
    let mut worst = 0.0f64;
    for (row, &label) in x.iter().zip(&y) {
        let f = model.raw_score(row);
        let numeric = (logistic_loss(label, f + h) - logistic_loss(label, f - h)) / (2.0 * h);
        let analytic = -logistic_gradient(label, f);
        let rel = (numeric - analytic).abs() / analytic.abs().max(1e-12);
        worst = worst.max(rel);
        let hess_numeric = (logistic_gradient(label, f - h) - logistic_gradient(label, f + h)) / (2.0 * h);
        let p = sigmoid(f);
        let hess_rel = (hess_numeric - p * (1.0 - p)).abs() / (p * (1.0 - p));
        ensure(rel < 1e-4, format!("gradient rel. error {rel} at f = {f}"))?;
        ensure(hess_rel < 1e-4, format!("hessian rel. error {hess_rel} at f = {f}"))?;
    }
    let full = GbdtConfig {
        trees: 200,
        subsample: 1.0,
        ..GbdtConfig::default()
    };
    let (_, report) = train(&x, &y, &full, "s").map_err(|e| e.to_string())?;
    ensure(report.loss_history.len() == 201, "loss history length")?;
    if let Some(i) = report.loss_history.windows(2).position(|w| w[1] > w[0]) {
        return Err(format!("loss rose at iteration {}", i + 1));
    }
    Ok(format!(
        "worst gradient rel. error {worst:.1e}; loss {:.4} -> {:.4} over 200 iterations",
        report.loss_history[0],
        report.loss_history[200]
    ))
}

fn corpus_run(cfg: &ExperimentConfig, out: &Path) -> Result<PipelineOutcome, String> {
    run_pipeline(cfg, out).map_err(|e| e.to_string())
}

fn pooled_apfd(run: &PipelineOutcome, s: Strategy) -> Vec<f64> {
    run.cv
        .report
        .apfd
        .iter()
        .filter(|r| r.strategy == s.name())
        .flat_map(|r| r.apfd.iter().copied())
        .collect()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn oracle_dominance(run: &PipelineOutcome, took: Duration) -> Check {
    let versions = run.programs.len();
    ensure(versions >= 20, format!("only {versions} faulty versions"))?;
    for p in &run.programs {
        let share = p.matrix.fault_revealing.iter().filter(|&&r| r).count() as f64 / p.matrix.fault_revealing.len() as f64;
        ensure(share > 0.0 && share < 0.25, format!("{} revealed by {:.0}% of tests", p.id, share * 100.0))?;
    }
    let oracle = pooled_apfd(run, Strategy::Oracle);
    let farm = pooled_apfd(run, Strategy::Farm);
    ensure(oracle.len() >= 100, format!("only {} runs", oracle.len()))?;
    let mut parts = vec![format!("{} runs, oracle median {:.4}", oracle.len(), median(&oracle))];
    for base in [Strategy::DummyRandom, Strategy::SpreadRandom] {
        let b = pooled_apfd(run, base);
        let w = wilcoxon_ranksum(&oracle, &b);
        ensure(
            median(&oracle) > median(&b),
            format!("oracle median {} not above {} {}", median(&oracle), base.name(), median(&b)),
        )?;
        ensure(w.p < 0.01, format!("oracle vs {}: p = {}", base.name(), w.p))?;
        parts.push(format!("{} {:.4} (p {:.1e})", base.name(), median(&b), w.p));
    }
    let dummy = pooled_apfd(run, Strategy::DummyRandom);
    parts.push(format!("farm {:.4}", median(&farm)));
    ensure(
        median(&farm) >= median(&dummy),
        format!("trained farm median {:.4} below dummy-random {:.4}", median(&farm), median(&dummy)),
    )?;
    ensure(took < Duration::from_secs(15 * 60), format!("pipeline took {took:.0?}, limit 15 min"))?;
    Ok(format!("{}; pipeline took {took:.0?}", parts.join(", ")))
}

fn tce_soundness() -> Check {
    let start = Instant::now();
    let exec = ExecConfig::default();
    let mut checked = 0usize;
    for e in load_corpus(&data("corpus")).map_err(|e| e.to_string())? {
        let p = e.faulty().map_err(|e| e.to_string())?;
        let mut ms = enumerate_mutants(&e.id, &p, &build_cfg(&p));
        dedup_mutants(&p, &mut ms);
        let base: Vec<_> = e.tests.iter().map(|t| run_program(&p, &t.input, exec.steps).observed()).collect();
        for m in ms.iter().filter(|m| m.tce == TceStatus::TriviallyEquivalent) {
            let mp = apply_mutant(&p, m).map_err(|e| e.to_string())?;
            for (t, want) in e.tests.iter().zip(&base) {
                let got = run_program(&mp, &t.input, exec.steps).observed();
                ensure(&got == want, format!("{} mutant {} differs on test {}", e.id, m.id, t.id))?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, "no trivially equivalent mutants")?;
    within(start, Duration::from_secs(5 * 60))?;
    Ok(format!("{checked} mutant-test executions identical in {:.2?}", start.elapsed()))
}

fn subsumption() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..1000 {
        let (m, t) = (rng.gen_range(1..=10), rng.gen_range(1..=8));
        let density = rng.gen_range(0.1..0.7);
        let killers: Vec<Vec<usize>> = (0..m).map(|_| (0..t).filter(|_| rng.gen_bool(density)).collect()).collect();
        let ks = KillSets::from_killers(killers.clone(), vec![false; t]);
        let set = |r: usize| -> BTreeSet<usize> { killers[r].iter().copied().collect() };
        // Killable mutants no other killable mutant strictly subsumes,
        // keeping the first of each group with the same kill set.
        let mut want = Vec::new();
        for i in 0..m {
            if killers[i].is_empty() {
                continue;
            }
            let (si, mut keep) = (set(i), true);
            for j in 0..m {
                let sj = set(j);
                if j == i || sj.is_empty() {
                    continue;
                }
                if (sj.is_subset(&si) && sj != si) || (sj == si && j < i) {
                    keep = false;
                }
            }
            if keep {
                want.push(i);
            }
        }
        let mut got = subsuming_set(&ks);
        got.sort_unstable();
        ensure(got == want, format!("matrix {case}: {got:?} vs brute force {want:?}"))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("1000 random matrices agree in {:.2?}", start.elapsed()))
}

fn determinism() -> Check {
    let mut cfg = ExperimentConfig {
        corpus: data("corpus"),
        repetitions: 20,
        k: 5,
        ..Default::default()
    };
    cfg.gbdt.trees = 20;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = corpus_run(&cfg, a.path())?;
    let second = corpus_run(&cfg, b.path())?;
    ensure(!first.report_files.is_empty(), "no report files")?;
    for ((name, x), (_, y)) in first.report_files.iter().zip(&second.report_files) {
        ensure(x == y, format!("{name} differs"))?;
        let on_disk = std::fs::read(b.path().join("report").join(name)).map_err(|e| e.to_string())?;
        ensure(on_disk == y.as_bytes(), format!("{name} on disk differs"))?;
    }
    ensure(first.report_files.len() == second.report_files.len(), "report file sets differ")?;
    Ok(format!("{} report CSVs byte-identical", first.report_files.len()))
}

fn farm_star_prefix(run: &PipelineOutcome) -> Check {
    let mut checked = 0;
    for (prog, rankings) in &run.cv.rankings {
        let pred = &run.cv.predictions[prog];
        let kill: std::collections::BTreeMap<usize, f64> = pred.ids.iter().copied().zip(pred.kill.iter().copied()).collect();
        let r = rankings.get(&Strategy::FarmStar).ok_or("no farm-star ranking")?;
        let mut seen_low = false;
        for id in &r.order {
            let likely = kill[id] >= 0.5;
            ensure(!(seen_low && likely), format!("{prog}: mutant {id} follows a mutant below 0.5"))?;
            seen_low |= !likely;
        }
        checked += 1;
    }
    ensure(checked == run.programs.len(), "missing programs")?;
    Ok(format!("{checked} programs, zero violations"))
}

fn cost_alignment(run: &PipelineOutcome) -> Check {
    let report = &run.cv.report;
    ensure(!report.stats.is_empty(), "no comparisons")?;
    for s in &report.stats {
        if let Some(pct) = s.budget_pct {
            let pick = |name: &str| -> Vec<(String, usize, bool)> {
                let mut v: Vec<_> = report
                    .points
                    .iter()
                    .filter(|p| p.strategy == name && p.budget_pct == pct)
                    .map(|p| (p.program.clone(), p.analysed_budget, p.short))
                    .collect();
                v.sort();
                v
            };
            let (a, b) = (pick(&s.strategy_a), pick(&s.strategy_b));
            ensure(a.len() == b.len() && !a.is_empty(), format!("{} vs {}: program sets differ", s.strategy_a, s.strategy_b))?;
            for (x, y) in a.iter().zip(&b) {
                ensure(x.0 == y.0 && x.1 == y.1 && !x.2 && !y.2, format!("{} vs {} misaligned on {}", s.strategy_a, s.strategy_b, x.0))?;
            }
        }
    }
    let mut points = report.points.clone();
    let victim = points
        .iter_mut()
        .find(|p| p.strategy == Strategy::DummyRandom.name())
        .ok_or("no dummy-random points")?;
    let pct = victim.budget_pct;
    victim.analysed_budget += 1;
    ensure(
        compare_at_budget(&points, Strategy::Farm.name(), Strategy::DummyRandom.name(), pct).is_err(),
        "misaligned budget accepted",
    )?;
    let mut records: Vec<ApfdRecord> = report.apfd.clone();
    let r = records.iter_mut().find(|r| r.strategy == Strategy::Farm.name()).ok_or("no farm records")?;
    r.population -= 1;
    ensure(
        compare_apfd(&records, Strategy::Farm.name(), Strategy::DummyRandom.name()).is_err(),
        "misaligned APFD populations accepted",
    )?;
    let sdl = compare_apfd(&report.apfd, Strategy::Farm.name(), Strategy::Sdl.name());
    ensure(sdl.is_err(), "incomplete ranking accepted in an APFD comparison")?;
    Ok(format!("{} comparisons aligned; misaligned inputs rejected", report.stats.len()))
}

fn main() {
    let mut results: Vec<(u32, &str, Check)> = Vec::new();
    let mut run = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Check| {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match &r {
            Ok(msg) => println!("PASS {n:>2} {name}: {msg}"),
            Err(msg) => println!("FAIL {n:>2} {name}: {msg}"),
        }
        results.push((n, name, r));
    };
    run(1, "worked example", &mut worked_example);
    run(2, "simulation oracle", &mut simulation_oracle);
    run(3, "statistics", &mut statistics);
    run(4, "gbdt gradients", &mut gbdt_gradients);

    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        corpus: data("corpus"),
        ..Default::default()
    };
    let start = Instant::now();
    let full = corpus_run(&cfg, dir.path());
    let took = start.elapsed();
    let with_full = |f: &dyn Fn(&PipelineOutcome) -> Check| -> Check {
        match &full {
            Ok(o) => f(o),
            Err(e) => Err(format!("pipeline failed: {e}")),
        }
    };
    run(5, "oracle dominance", &mut || with_full(&|o| oracle_dominance(o, took)));
    run(6, "tce soundness", &mut tce_soundness);
    run(7, "subsumption", &mut subsumption);
    run(8, "determinism", &mut determinism);
    run(9, "farm-star prefix", &mut || with_full(&farm_star_prefix));
    run(10, "cost alignment", &mut || with_full(&cost_alignment));

    let failed: Vec<u32> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("all {} criteria pass", results.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
