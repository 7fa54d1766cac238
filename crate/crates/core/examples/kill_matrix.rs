//! Execute the mutants of a corpus program and summarise the kill matrix.

use std::path::Path;

use mutsel::corpus::load_corpus;
use mutsel::exec::{build_kill_matrix, ExecConfig};
use mutsel::frontend::build_cfg;
use mutsel::mutation::enumerate_mutants;
use mutsel::tce::dedup_mutants;

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus");
    let entry = load_corpus(&root)?
        .into_iter()
        .find(|e| e.id == "gcd/no_abs")
        .ok_or("corpus entry missing")?;
    let faulty = entry.faulty()?;
    let mut ms = enumerate_mutants(&entry.id, &faulty, &build_cfg(&faulty));
    dedup_mutants(&faulty, &mut ms);
    ms.retain(|m| m.tce.is_live());
    let km = build_kill_matrix(&faulty, &entry.correct()?, &ms, &entry.tests, &ExecConfig::default());
    let killable = (0..km.n_mutants()).filter(|&r| km.is_killable(r)).count();
    let revealing = km.fault_revealing.iter().filter(|&&r| r).count();
    let full = (0..km.n_mutants())
        .filter(|&r| km.fault_revealing_ratio(r) == Some(1.0))
        .count();
    Ok(format!(
        "{}: {} live mutants x {} tests\n{killable} killable, {full} fault revealing, {revealing} tests reveal the fault\n",
        entry.id,
        km.n_mutants(),
        km.n_tests()
    ))
}

fn main() {
    print!("{}", run_example().unwrap());
}
