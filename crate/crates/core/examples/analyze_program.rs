//! Parse a program and print its control flow graph and dependences.

use mutsel::frontend::Analysis;

const SRC: &str = include_str!("../data/rotate_queries.mc");

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let an = Analysis::from_source(SRC)?;
    let mut out = String::new();
    for fc in &an.cfg.functions {
        out += &format!("function {}: {} blocks\n", fc.function, fc.blocks.len());
        for b in &fc.blocks {
            out += &format!("  b{} {:<18} succs {:?}\n", b.index, b.kind.label(), b.succs);
        }
    }
    out += &format!(
        "{} data edges, {} control edges\n",
        an.deps.data.len(),
        an.deps.control.len()
    );
    Ok(out)
}

fn main() {
    print!("{}", run_example().unwrap());
}
