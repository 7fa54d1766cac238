pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod exec;
pub mod features;
pub mod frontend;
pub mod gbdt;
pub mod mutation;
pub mod pipeline;
pub mod rng;
pub mod strategies;
pub mod tce;
