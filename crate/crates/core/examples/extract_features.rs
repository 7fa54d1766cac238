//! Static features of the decrement swap on the loop condition.

use mutsel::features::{extract_all, fit_encoder, BOOLEAN, NUMERIC};
use mutsel::frontend::Analysis;
use mutsel::mutation::enumerate_mutants;

const SRC: &str = include_str!("../data/rotate_queries.mc");

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let an = Analysis::from_source(SRC)?;
    let ms = enumerate_mutants("rotate", &an.program, &an.cfg);
    let records = extract_all(&an, &ms);
    let i = ms
        .iter()
        .position(|m| m.span.line == 48 && m.type_string == "()-- → ()++")
        .ok_or("mutant not found")?;
    let r = &records[i];
    let mut out = String::new();
    for name in NUMERIC {
        out += &format!("{name:<26} {}\n", r.numeric(name));
    }
    for name in BOOLEAN {
        out += &format!("{name:<26} {}\n", r.boolean(name));
    }
    out += &format!("{:<26} {}\n", "TypeStmtBB", r.category("TypeStmtBB"));
    let enc = fit_encoder(&records);
    out += &format!("encoded width {}\n", enc.width());
    Ok(out)
}

fn main() {
    print!("{}", run_example().unwrap());
}
