//! Run the whole experiment on the bundled corpus with a small model.

use std::path::Path;

use mutsel::pipeline::{run_pipeline, ExperimentConfig};
use mutsel::strategies::Strategy;

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join(format!("mutsel-example-{}", std::process::id()));
    let mut cfg = ExperimentConfig {
        corpus: Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus"),
        repetitions: 20,
        k: 5,
        strategies: vec![Strategy::Farm, Strategy::DummyRandom, Strategy::Oracle],
        ..Default::default()
    };
    cfg.gbdt.trees = 20;
    cfg.gbdt.depth = 3;
    let done = run_pipeline(&cfg, &out)?;
    let mut text = format!("{} programs, {} artifacts in {}\n", done.programs.len(), done.artifacts.len(), out.display());
    for row in &done.cv.report.stats {
        if row.metric == "apfd" {
            text += &format!(
                "{} vs {}: median {:.3} vs {:.3}, p = {:.3e}\n",
                row.strategy_a, row.strategy_b, row.median_a, row.median_b, row.p
            );
        }
    }
    std::fs::remove_dir_all(&out)?;
    Ok(text)
}

fn main() {
    print!("{}", run_example().unwrap());
}
