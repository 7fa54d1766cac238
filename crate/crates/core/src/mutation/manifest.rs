//! Mutant manifest CSV.

use std::io::Write;

use super::Mutant;

pub const HEADER: [&str; 9] = [
    "mutant_id",
    "program_id",
    "operator_id",
    "stmt_id",
    "expr_id",
    "block_id",
    "type_string",
    "line",
    "column",
];

pub fn write_manifest<W: Write>(out: W, mutants: &[Mutant]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for m in mutants {
        w.write_record([
            m.id.to_string(),
            m.program_id.clone(),
            m.operator.id().to_string(),
            m.stmt.0.to_string(),
            m.expr.0.to_string(),
            m.block.to_string(),
            m.type_string.clone(),
            m.span.line.to_string(),
            m.span.column.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn manifest_string(mutants: &[Mutant]) -> String {
    let mut buf = Vec::new();
    write_manifest(&mut buf, mutants).expect("in-memory write");
    String::from_utf8(buf).expect("csv is utf-8")
}
