//! Experiment harness: configuration, the seeded Monte Carlo runner,
//! statistics, structured reports, the shipped machine corpus, and the
//! command-line interface.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod report;
pub mod runner;
pub mod scenarios;
pub mod stats;
