//! Stage caching and error surfacing of the full pipeline.

use std::fs;
use std::path::Path;

use mutsel::pipeline::{run_pipeline, ExperimentConfig};
use mutsel::strategies::Strategy;

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let dest = to.join(e.file_name());
        if e.file_type().unwrap().is_dir() {
            copy_dir(&e.path(), &dest);
        } else {
            fs::copy(e.path(), dest).unwrap();
        }
    }
}

fn small_config(corpus: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        corpus: corpus.to_path_buf(),
        repetitions: 5,
        k: 3,
        strategies: vec![Strategy::Farm, Strategy::DummyRandom],
        ..Default::default()
    };
    cfg.gbdt.trees = 3;
    cfg.gbdt.depth = 2;
    cfg
}

#[test]
fn editing_one_source_reruns_only_its_stages() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    copy_dir(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus"), &corpus);
    let out = dir.path().join("out");
    let cfg = small_config(&corpus);

    let first = run_pipeline(&cfg, &out).unwrap();
    assert!(first.stage_runs.iter().all(|r| !r.cached));

    let second = run_pipeline(&cfg, &out).unwrap();
    for r in &second.stage_runs {
        assert_eq!(r.cached, r.stage != "crossval", "{r:?}");
    }
    assert_eq!(first.report_files, second.report_files);

    let edited = corpus.join("gcd/faulty/no_abs.mc");
    let src = fs::read_to_string(&edited).unwrap();
    fs::write(&edited, src.replacen("print g;", "print g + 0;", 1)).unwrap();
    let third = run_pipeline(&cfg, &out).unwrap();
    for r in &third.stage_runs {
        let expect_rerun = r.item == "gcd/no_abs" || r.stage == "crossval";
        assert_eq!(!r.cached, expect_rerun, "{r:?}");
    }
    let changed: Vec<&String> = third
        .artifacts
        .iter()
        .filter(|(k, v)| first.artifacts.get(*k) != Some(*v))
        .map(|(k, _)| k)
        .filter(|k| k.starts_with("programs/"))
        .collect();
    assert!(!changed.is_empty());
    assert!(changed.iter().all(|k| k.starts_with("programs/gcd/no_abs/")), "{changed:?}");

    let correct = corpus.join("gcd/correct.mc");
    let src = fs::read_to_string(&correct).unwrap();
    fs::write(&correct, format!("{src}\n")).unwrap();
    let fourth = run_pipeline(&cfg, &out).unwrap();
    for r in &fourth.stage_runs {
        let gcd = r.item.starts_with("gcd/");
        let expect_rerun = (gcd && r.stage == "exec") || r.stage == "crossval";
        assert_eq!(!r.cached, expect_rerun, "{r:?}");
    }
}

#[test]
fn too_many_folds_is_a_stage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus"));
    cfg.k = 50;
    let err = run_pipeline(&cfg, dir.path()).err().unwrap();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("crossval"), "{err}");
}

#[test]
fn manifest_lists_every_artifact_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus"));
    let done = run_pipeline(&cfg, dir.path()).unwrap();
    let manifest: std::collections::BTreeMap<String, String> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest, done.artifacts);
    for (rel, hash) in &manifest {
        let bytes = fs::read(dir.path().join(rel)).unwrap();
        assert_eq!(&mutsel::pipeline::store::sha256_hex(&bytes), hash, "{rel}");
    }
    for name in ["apfd.csv", "fault_revelation.csv", "curves.csv", "selection.csv", "stats.csv"] {
        assert!(manifest.contains_key(&format!("report/{name}")), "{name}");
    }
}
