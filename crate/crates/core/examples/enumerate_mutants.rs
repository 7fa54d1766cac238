//! Enumerate the mutants of a program and count them per operator.

use std::collections::BTreeMap;

use mutsel::frontend::Analysis;
use mutsel::mutation::enumerate_mutants;

const SRC: &str = include_str!("../data/rotate_queries.mc");

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let an = Analysis::from_source(SRC)?;
    let ms = enumerate_mutants("rotate", &an.program, &an.cfg);
    let mut per_op: BTreeMap<String, usize> = BTreeMap::new();
    for m in &ms {
        *per_op.entry(m.operator.name()).or_default() += 1;
    }
    let mut out = format!("{} mutants\n", ms.len());
    for (op, n) in per_op {
        out += &format!("  {op:<40} {n}\n");
    }
    let on_loop = ms.iter().filter(|m| m.span.line == 48).count();
    out += &format!("{on_loop} mutants on `while (m-- > 0)`\n");
    Ok(out)
}

fn main() {
    print!("{}", run_example().unwrap());
}
