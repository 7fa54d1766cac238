//! Execution and equivalence properties over the bundled corpus.

use std::collections::BTreeMap;
use std::path::Path;

use mutsel::corpus::{load_corpus, CorpusEntry};
use mutsel::exec::{baseline, build_kill_matrix, run_program, Cell, ExecConfig};
use mutsel::frontend::{build_cfg, parse_program, pretty_print};
use mutsel::mutation::{apply_mutant, enumerate_mutants, Mutant, TceStatus};
use mutsel::tce::{canonicalize, dedup_mutants};

fn corpus() -> Vec<CorpusEntry> {
    load_corpus(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus")).unwrap()
}

fn mutants(e: &CorpusEntry) -> Vec<Mutant> {
    let p = e.faulty().unwrap();
    let mut ms = enumerate_mutants(&e.id, &p, &build_cfg(&p));
    dedup_mutants(&p, &mut ms);
    ms
}

#[test]
fn every_mutant_reparses_and_touches_one_statement() {
    for e in corpus() {
        let p = e.faulty().unwrap();
        let original = pretty_print(&p);
        for m in mutants(&e) {
            let mp = apply_mutant(&p, &m).unwrap();
            let text = pretty_print(&mp);
            let back = parse_program(&text).unwrap_or_else(|err| panic!("{} mutant {}: {err}\n{text}", e.id, m.id));
            assert_eq!(pretty_print(&back), text);
            assert_ne!(text, original, "{} mutant {} is a no-op", e.id, m.id);
        }
    }
}

#[test]
fn canonicalization_is_idempotent() {
    for e in corpus() {
        let p = e.faulty().unwrap();
        let once = canonicalize(&p);
        let reparsed = parse_program(&once.0).unwrap();
        assert_eq!(canonicalize(&reparsed), once, "{}", e.id);
    }
}

#[test]
fn duplicate_groups_share_kill_rows() {
    let cfg = ExecConfig::default();
    for e in corpus() {
        let p = e.faulty().unwrap();
        let ms = mutants(&e);
        let grouped: Vec<Mutant> = ms
            .iter()
            .filter(|m| m.tce.is_live() || matches!(m.tce, TceStatus::DuplicateOf(_)))
            .cloned()
            .collect();
        let km = build_kill_matrix(&p, &e.correct().unwrap(), &grouped, &e.tests, &cfg);
        let kills = |id: usize| -> Vec<bool> {
            let r = km.row_of(id).unwrap();
            km.cells[r].iter().map(|c| c.is_kill()).collect()
        };
        for m in &grouped {
            if let TceStatus::DuplicateOf(rep) = m.tce {
                assert_eq!(kills(m.id), kills(rep), "{} mutant {} vs {rep}", e.id, m.id);
            }
        }
    }
}

#[test]
fn skipped_pairs_never_kill() {
    let cfg = ExecConfig::default();
    let mut skipped = 0;
    for e in corpus() {
        let p = e.faulty().unwrap();
        let live: Vec<Mutant> = mutants(&e).into_iter().filter(|m| m.tce.is_live()).collect();
        let km = build_kill_matrix(&p, &e.correct().unwrap(), &live, &e.tests, &cfg);
        let base = baseline(&p, &e.correct().unwrap(), &e.tests, &cfg);
        for (r, m) in live.iter().enumerate() {
            let mp = apply_mutant(&p, m).unwrap();
            for (t, test) in e.tests.iter().enumerate() {
                if km.cells[r][t] != Cell::Uncovered {
                    continue;
                }
                skipped += 1;
                let run = run_program(&mp, &test.input, cfg.mutant_budget(base.steps[t]));
                assert_eq!(run.observed(), base.outcomes[t], "{} mutant {} test {}", e.id, m.id, test.id);
            }
        }
    }
    assert!(skipped > 0);
}

#[test]
fn execution_is_deterministic_and_original_never_kills_itself() {
    let cfg = ExecConfig::default();
    for e in corpus() {
        let p = e.faulty().unwrap();
        for t in &e.tests {
            let a = run_program(&p, &t.input, cfg.steps);
            let b = run_program(&p, &t.input, cfg.steps);
            assert_eq!(a, b);
        }
    }
}

#[test]
fn every_catalog_operator_is_instantiated() {
    let mut per_op: BTreeMap<String, usize> = BTreeMap::new();
    for e in corpus() {
        for m in mutants(&e) {
            *per_op.entry(m.operator.name()).or_default() += 1;
        }
    }
    // The corpus has no pointer arithmetic; a small fixture covers it.
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pointer_walk.mc")).unwrap();
    let p = parse_program(&src).unwrap();
    for m in enumerate_mutants("pointer_walk", &p, &build_cfg(&p)) {
        *per_op.entry(m.operator.name()).or_default() += 1;
    }
    assert_eq!(per_op.len(), 18, "{per_op:?}");
}
