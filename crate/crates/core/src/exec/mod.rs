//! Execution of original and mutated programs.

pub mod interp;
pub mod matrix;

use serde::{Deserialize, Serialize};

use crate::error::SchemaError;

pub use interp::{run_program, Observed, Outcome, RunResult, DEFAULT_STEP_BUDGET};
pub use matrix::{baseline, build_kill_matrix, Baseline, Cell, ExecConfig, KillMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    pub input: Vec<i64>,
}

/// One test per non-blank line of whitespace-separated integers. Ids are
/// `t<index>` in file order.
pub fn parse_tests(text: &str) -> Result<Vec<TestCase>, SchemaError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut input = Vec::new();
        for (col, tok) in line.split_whitespace().enumerate() {
            input.push(
                tok.parse()
                    .map_err(|_| SchemaError::at("test file", ln + 1, col + 1, format!("not an integer: {tok:?}")))?,
            );
        }
        out.push(TestCase {
            id: format!("t{}", out.len()),
            input,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blank_lines_are_skipped_and_bad_tokens_located() {
        let ts = parse_tests("1 2 3\n\n-4\n").unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[1], TestCase { id: "t1".into(), input: vec![-4] });
        let e = parse_tests("1\n2 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 2));
    }
}
