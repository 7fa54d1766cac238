//! Flag trivially equivalent and duplicate mutants by canonical form.

use mutsel::frontend::Analysis;
use mutsel::mutation::{enumerate_mutants, TceStatus};
use mutsel::tce::dedup_mutants;

const SRC: &str = "int main() {
    int x;
    int y;
    read x;
    y = x * 1 + 0;
    print y;
    return 0;
}
";

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let an = Analysis::from_source(SRC)?;
    let mut ms = enumerate_mutants("tce", &an.program, &an.cfg);
    dedup_mutants(&an.program, &mut ms);
    let equivalent = ms.iter().filter(|m| m.tce == TceStatus::TriviallyEquivalent).count();
    let duplicate = ms.iter().filter(|m| matches!(m.tce, TceStatus::DuplicateOf(_))).count();
    let live = ms.len() - equivalent - duplicate;
    let mut out = format!("{} mutants: {live} live, {equivalent} equivalent, {duplicate} duplicate\n", ms.len());
    for m in ms.iter().filter(|m| m.tce == TceStatus::TriviallyEquivalent).take(5) {
        out += &format!("  equivalent: line {} {}\n", m.span.line, m.type_string);
    }
    Ok(out)
}

fn main() {
    print!("{}", run_example().unwrap());
}
