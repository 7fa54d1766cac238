//! Command-line subcommands, persisted formats and exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use mutsel::cli::run_with_args;
use mutsel::exec::KillMatrix;
use mutsel::strategies::Ranking;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["mutsel"];
    argv.extend_from_slice(args);
    let code = run_with_args(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn parse_mutate_tce_and_features() {
    let src = data("rotate_queries.mc");
    let (code, out) = run(&["parse", s(&src)]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.is_object());
    let (code, pretty) = run(&["parse", "--pretty", s(&src)]);
    assert_eq!(code, 0);
    assert!(pretty.contains("while (m-- > 0)"));

    let (code, manifest) = run(&["mutate", s(&src)]);
    assert_eq!(code, 0);
    assert!(manifest.starts_with("mutant_id,program_id,operator_id,stmt_id,expr_id,block_id,type_string,line,column"));
    let (code, tce) = run(&["tce", s(&src)]);
    assert_eq!(code, 0);
    assert_eq!(tce.lines().count(), manifest.lines().count());
    let (code, features) = run(&["features", s(&src)]);
    assert_eq!(code, 0);
    assert!(features.starts_with("mutant_id,"));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mc");
    fs::write(&bad, "int main() { int x = *3; }").unwrap();
    assert_eq!(run(&["parse", s(&bad)]).0, 2);
    assert_eq!(run(&["select", "--ranking", s(&bad)]).0, 1);
    assert_eq!(run(&["--budgets", "0", "lint-corpus"]).0, 1);
}

#[test]
fn empty_corpus_fails_lint_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["lint-corpus", s(dir.path())]).0, 2);
    let (code, out) = run(&["lint-corpus", s(&data("corpus"))]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.starts_with("ok ")));
}

#[test]
fn matrix_round_trip_and_decoupled_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = data("corpus/gcd");
    let m = dir.path().join("m");
    let (code, _) = run(&[
        "exec",
        "--faulty",
        s(&corpus.join("faulty/no_abs.mc")),
        "--correct",
        s(&corpus.join("correct.mc")),
        "--tests",
        s(&corpus.join("tests.txt")),
        "--out",
        s(&m),
    ]);
    assert_eq!(code, 0);
    let read = |n: &str| fs::read(m.join(n)).unwrap();
    let km = KillMatrix::import(&read("matrix.csv")[..], &read("matrix_tests.csv")[..], Some(&read("matrix_costs.csv")[..]))
        .unwrap();
    let mut again = Vec::new();
    km.export(&mut again).unwrap();
    assert_eq!(again, read("matrix.csv"));

    // A hand-written ranking over the imported ids, evaluated without any
    // source program.
    let ranking = Ranking {
        strategy: "farm".into(),
        seed: None,
        order: km.mutant_ids.iter().rev().copied().collect(),
        scores: None,
    };
    let rpath = dir.path().join("farm.csv");
    let mut buf = Vec::new();
    ranking.write_csv(&mut buf).unwrap();
    fs::write(&rpath, buf).unwrap();
    let report = dir.path().join("report");
    let (code, _) = run(&[
        "--repetitions",
        "10",
        "--budgets",
        "5,10",
        "evaluate",
        "--matrix",
        s(&m.join("matrix.csv")),
        "--tests",
        s(&m.join("matrix_tests.csv")),
        "--ranking",
        s(&rpath),
        "--out",
        s(&report),
    ]);
    assert_eq!(code, 0);
    let apfd = fs::read_to_string(report.join("apfd.csv")).unwrap();
    assert_eq!(apfd.lines().count(), 11);

    let (code, picked) = run(&["select", "--ranking", s(&rpath), "--budget", "3"]);
    assert_eq!(code, 0);
    let ids: Vec<usize> = picked.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(ids, ranking.order[..3]);

    let (code, _) = run(&["stats", "--report", s(&report), "--a", "farm", "--b", "farm"]);
    assert_eq!(code, 0);
}

#[test]
fn corrupt_matrix_cell_reports_position() {
    let matrix = "mutant_id,t0,t1\n3,K,S\n4,S,X\n";
    let tests = "test_id,fault_revealing,original_steps\nt0,1,5\nt1,0,5\n";
    let err = KillMatrix::import(matrix.as_bytes(), tests.as_bytes(), None::<&[u8]>).unwrap_err();
    assert_eq!((err.line, err.column), (3, 3));
}

#[test]
fn train_then_rank_a_program() {
    let dir = tempfile::tempdir().unwrap();
    let models = dir.path().join("models");
    let (code, _) = run(&["--corpus", s(&data("corpus")), "--trees", "5", "train", "--out", s(&models)]);
    assert_eq!(code, 0);
    let src = data("corpus/gcd/faulty/no_abs.mc");
    let out = dir.path().join("r.csv");
    for st in ["farm", "farm-star", "pred-killable", "spread-random", "sdl"] {
        let (code, _) = run(&["rank", s(&src), "--models", s(&models), "--strategy", st, "--out", s(&out)]);
        assert_eq!(code, 0, "{st}");
        let r = Ranking::read_csv(fs::File::open(&out).unwrap()).unwrap();
        assert_eq!(r.strategy, st);
        assert!(!r.is_empty());
    }
    let (code, _) = run(&["rank", s(&src), "--models", s(&models), "--strategy", "oracle"]);
    assert_eq!(code, 1);
}
