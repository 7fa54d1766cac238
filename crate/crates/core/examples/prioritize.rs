//! Rank mutants with several strategies and compare their APFD.

use std::collections::BTreeMap;

use mutsel::eval::stats::median;
use mutsel::eval::{simulate_prioritization, KillSets};
use mutsel::frontend::NodeId;
use mutsel::strategies::{rank_by_probability, rank_farm_star, rank_random, RandomMode};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    // Rows are mutants; test 3 is the only one revealing the fault.
    let killers = vec![vec![0, 1], vec![1], vec![3], vec![], vec![2, 3], vec![0], vec![2], vec![]];
    let ks = KillSets::from_killers(killers, vec![false, false, false, true]);
    let ids: Vec<usize> = (0..8).collect();
    let stmt_of: BTreeMap<usize, NodeId> = ids.iter().map(|&i| (i, NodeId(i as u32 / 2))).collect();
    let kill: BTreeMap<usize, f64> = ids.iter().map(|&i| (i, if i == 3 || i == 7 { 0.1 } else { 0.9 })).collect();
    let fr: BTreeMap<usize, f64> = ids.iter().map(|&i| (i, [0.1, 0.2, 0.9, 0.95, 0.7, 0.1, 0.3, 0.4][i])).collect();
    let rankings = [
        rank_by_probability("farm", &ids, &fr)?,
        rank_farm_star(&ids, &kill, &fr)?,
        rank_random(&ids, RandomMode::Dummy, &stmt_of, 3)?,
        rank_random(&ids, RandomMode::Spread, &stmt_of, 3)?,
    ];
    let mask = vec![false; ids.len()];
    let mut out = String::new();
    for r in &rankings {
        let runs = simulate_prioritization(&ks, &r.order, &mask, 100, 11)?;
        let apfd: Vec<f64> = runs.iter().map(|r| r.apfd).collect();
        out += &format!("{:<14} {:?} median APFD {:.3}\n", r.strategy, r.order, median(&apfd).unwrap());
    }
    Ok(out)
}

fn main() {
    print!("{}", run_example().unwrap());
}
