//! Experimental machinery: tester simulations, scores, statistics and
//! report assembly.

pub mod classify;
pub mod folds;
pub mod info;
pub mod report;
pub mod scores;
pub mod sim;
pub mod stats;

use thiserror::Error;

pub use classify::{roc_auc, threshold_metrics, top_k_metrics, ClassMetrics};
pub use folds::{kfold_split, FoldPlan};
pub use info::feature_information_gain;
pub use report::{BudgetPoint, EvalReport, StatRow};
pub use scores::{mutation_score, subsuming_score, subsuming_set};
pub use sim::{apfd, rep_seed, simulate_prioritization, simulate_selection, KillSets, PrioritizationRun, SelectionOutcome};
pub use stats::{vargha_delaney_a12, wilcoxon_ranksum};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("empty selection")]
    EmptySelection,
    #[error("empty ranking")]
    EmptyRanking,
    #[error("at least one repetition is required")]
    NoRepetitions,
    #[error("{k} folds requested but only {groups} groups")]
    TooManyFolds { k: usize, groups: usize },
    #[error("misaligned comparison of {a} and {b}: {reason}")]
    Misaligned { a: String, b: String, reason: String },
}
