//! Mutant × test kill matrices.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::interp::{run_program, Observed};
use super::TestCase;
use crate::error::SchemaError;
use crate::frontend::ast::{NodeId, Program};
use crate::mutation::{apply_mutant, Mutant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Killed,
    Survived,
    /// The test never reached the mutated statement; counts as survived.
    Uncovered,
}

impl Cell {
    pub fn symbol(self) -> char {
        match self {
            Cell::Killed => 'K',
            Cell::Survived => 'S',
            Cell::Uncovered => 'U',
        }
    }

    pub fn from_symbol(c: &str) -> Option<Cell> {
        match c {
            "K" => Some(Cell::Killed),
            "S" => Some(Cell::Survived),
            "U" => Some(Cell::Uncovered),
            _ => None,
        }
    }

    pub fn is_kill(self) -> bool {
        self == Cell::Killed
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillMatrix {
    pub mutant_ids: Vec<usize>,
    pub test_ids: Vec<String>,
    /// `cells[m][t]`.
    pub cells: Vec<Vec<Cell>>,
    /// Whether the faulty program's output differs from the correct one.
    pub fault_revealing: Vec<bool>,
    /// Steps of the original run per test.
    pub original_steps: Vec<u64>,
    /// `cost[m][t]`: steps spent running the mutant, 0 when skipped.
    pub cost: Vec<Vec<u64>>,
}

/// Budgets for one matrix build. Mutants get a per-test budget scaled from
/// the original run, capped at `steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub steps: u64,
    pub mutant_factor: u64,
    pub mutant_slack: u64,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            steps: super::DEFAULT_STEP_BUDGET,
            mutant_factor: 10,
            mutant_slack: 1_000,
        }
    }
}

impl ExecConfig {
    pub fn mutant_budget(&self, original_steps: u64) -> u64 {
        original_steps
            .saturating_mul(self.mutant_factor)
            .saturating_add(self.mutant_slack)
            .min(self.steps)
    }
}

/// Original-version runs shared by every mutant of a program.
pub struct Baseline {
    pub outcomes: Vec<Observed>,
    pub steps: Vec<u64>,
    pub coverage: Vec<BTreeSet<NodeId>>,
    pub fault_revealing: Vec<bool>,
}

pub fn baseline(faulty: &Program, correct: &Program, tests: &[TestCase], cfg: &ExecConfig) -> Baseline {
    let mut b = Baseline {
        outcomes: Vec::new(),
        steps: Vec::new(),
        coverage: Vec::new(),
        fault_revealing: Vec::new(),
    };
    for t in tests {
        let orig = run_program(faulty, &t.input, cfg.steps);
        let good = run_program(correct, &t.input, cfg.steps);
        b.fault_revealing.push(orig.observed() != good.observed());
        b.outcomes.push(orig.observed());
        b.steps.push(orig.steps);
        b.coverage.push(orig.coverage);
    }
    b
}

/// Run every mutant against every test of `faulty`. Flagged (non-live)
/// mutants should be filtered out by the caller.
pub fn build_kill_matrix(
    faulty: &Program,
    correct: &Program,
    mutants: &[Mutant],
    tests: &[TestCase],
    cfg: &ExecConfig,
) -> KillMatrix {
    let base = baseline(faulty, correct, tests, cfg);
    let mut cells = Vec::with_capacity(mutants.len());
    let mut cost = Vec::with_capacity(mutants.len());
    for m in mutants {
        let mp = apply_mutant(faulty, m).ok();
        let mut row = Vec::with_capacity(tests.len());
        let mut crow = Vec::with_capacity(tests.len());
        for (ti, t) in tests.iter().enumerate() {
            match &mp {
                Some(mp) if base.coverage[ti].contains(&m.stmt) => {
                    let r = run_program(mp, &t.input, cfg.mutant_budget(base.steps[ti]));
                    row.push(if r.observed() != base.outcomes[ti] {
                        Cell::Killed
                    } else {
                        Cell::Survived
                    });
                    crow.push(r.steps);
                }
                _ => {
                    row.push(Cell::Uncovered);
                    crow.push(0);
                }
            }
        }
        cells.push(row);
        cost.push(crow);
    }
    KillMatrix {
        mutant_ids: mutants.iter().map(|m| m.id).collect(),
        test_ids: tests.iter().map(|t| t.id.clone()).collect(),
        cells,
        fault_revealing: base.fault_revealing,
        original_steps: base.steps,
        cost,
    }
}

impl KillMatrix {
    pub fn n_mutants(&self) -> usize {
        self.mutant_ids.len()
    }

    pub fn n_tests(&self) -> usize {
        self.test_ids.len()
    }

    pub fn row_of(&self, mutant_id: usize) -> Option<usize> {
        self.mutant_ids.iter().position(|&m| m == mutant_id)
    }

    pub fn kills(&self, row: usize, test: usize) -> bool {
        self.cells[row][test].is_kill()
    }

    /// Tests killing the mutant in `row`.
    pub fn killing_tests(&self, row: usize) -> Vec<usize> {
        (0..self.n_tests()).filter(|&t| self.kills(row, t)).collect()
    }

    pub fn is_killable(&self, row: usize) -> bool {
        self.cells[row].iter().any(|c| c.is_kill())
    }

    /// Fraction of killing tests that also reveal the fault; `None` when no
    /// test kills the mutant.
    pub fn fault_revealing_ratio(&self, row: usize) -> Option<f64> {
        let killers = self.killing_tests(row);
        if killers.is_empty() {
            return None;
        }
        let revealing = killers.iter().filter(|&&t| self.fault_revealing[t]).count();
        Some(revealing as f64 / killers.len() as f64)
    }

    /// Restrict to a subset of rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> KillMatrix {
        KillMatrix {
            mutant_ids: rows.iter().map(|&r| self.mutant_ids[r]).collect(),
            test_ids: self.test_ids.clone(),
            cells: rows.iter().map(|&r| self.cells[r].clone()).collect(),
            fault_revealing: self.fault_revealing.clone(),
            original_steps: self.original_steps.clone(),
            cost: rows.iter().map(|&r| self.cost[r].clone()).collect(),
        }
    }

    pub fn export<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["mutant_id".to_string()];
        header.extend(self.test_ids.iter().cloned());
        w.write_record(&header)?;
        for (id, row) in self.mutant_ids.iter().zip(&self.cells) {
            let mut rec = vec![id.to_string()];
            rec.extend(row.iter().map(|c| c.symbol().to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-test sidecar: fault flag and original step count.
    pub fn export_tests<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["test_id", "fault_revealing", "original_steps"])?;
        for (i, t) in self.test_ids.iter().enumerate() {
            w.write_record([
                t.clone(),
                u8::from(self.fault_revealing[i]).to_string(),
                self.original_steps[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-(mutant, test) step costs, laid out like the matrix.
    pub fn export_costs<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["mutant_id".to_string()];
        header.extend(self.test_ids.iter().cloned());
        w.write_record(&header)?;
        for (id, row) in self.mutant_ids.iter().zip(&self.cost) {
            let mut rec = vec![id.to_string()];
            rec.extend(row.iter().map(|c| c.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read a matrix and its sidecars. `costs` may be omitted, leaving
    /// all costs at 0.
    pub fn import<R1: Read, R2: Read, R3: Read>(
        matrix: R1,
        tests: R2,
        costs: Option<R3>,
    ) -> Result<KillMatrix, SchemaError> {
        let (test_ids, mutant_ids, cells) = read_grid(matrix, "kill matrix", |s| Cell::from_symbol(s))?;
        let mut fault_revealing = Vec::new();
        let mut original_steps = Vec::new();
        let mut r = csv::Reader::from_reader(tests);
        let header = r.headers().map_err(|e| SchemaError::csv("test sidecar", e))?.clone();
        if header.iter().collect::<Vec<_>>() != ["test_id", "fault_revealing", "original_steps"] {
            return Err(SchemaError::at("test sidecar", 1, 1, "unexpected header"));
        }
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| SchemaError::csv("test sidecar", e))?;
            let line = i + 2;
            if rec.get(0) != test_ids.get(i).map(String::as_str) {
                return Err(SchemaError::at("test sidecar", line, 1, "test id does not match matrix header"));
            }
            fault_revealing.push(match rec.get(1) {
                Some("1") => true,
                Some("0") => false,
                _ => return Err(SchemaError::at("test sidecar", line, 2, "fault flag must be 0 or 1")),
            });
            original_steps.push(
                rec.get(2)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| SchemaError::at("test sidecar", line, 3, "step count must be an integer"))?,
            );
        }
        if fault_revealing.len() != test_ids.len() {
            return Err(SchemaError::at("test sidecar", fault_revealing.len() + 2, 1, "missing test rows"));
        }
        let cost = match costs {
            Some(c) => {
                let (tids, mids, grid) = read_grid(c, "cost sidecar", |s| s.parse::<u64>().ok())?;
                if tids != test_ids || mids != mutant_ids {
                    return Err(SchemaError::at("cost sidecar", 1, 1, "layout does not match matrix"));
                }
                grid
            }
            None => vec![vec![0; test_ids.len()]; mutant_ids.len()],
        };
        Ok(KillMatrix {
            mutant_ids,
            test_ids,
            cells,
            fault_revealing,
            original_steps,
            cost,
        })
    }
}

type Grid<T> = (Vec<String>, Vec<usize>, Vec<Vec<T>>);

fn read_grid<R: Read, T>(input: R, what: &'static str, parse: impl Fn(&str) -> Option<T>) -> Result<Grid<T>, SchemaError> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = r.headers().map_err(|e| SchemaError::csv(what, e))?.clone();
    if header.get(0) != Some("mutant_id") {
        return Err(SchemaError::at(what, 1, 1, "first column must be mutant_id"));
    }
    let test_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut mutant_ids = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| SchemaError::csv(what, e))?;
        let line = i + 2;
        if rec.len() != header.len() {
            return Err(SchemaError::at(what, line, rec.len().min(header.len()) + 1, "wrong number of cells"));
        }
        mutant_ids.push(
            rec[0]
                .parse()
                .map_err(|_| SchemaError::at(what, line, 1, "mutant id must be an integer"))?,
        );
        let mut row = Vec::with_capacity(test_ids.len());
        for (j, s) in rec.iter().enumerate().skip(1) {
            row.push(parse(s).ok_or_else(|| SchemaError::at(what, line, j + 1, format!("invalid cell {s:?}")))?);
        }
        rows.push(row);
    }
    Ok((test_ids, mutant_ids, rows))
}
