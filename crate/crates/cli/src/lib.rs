//! Experiment harness for the lattice verification suite: configuration,
//! reports, and the experiments behind each CLI subcommand.

pub mod config;
pub mod experiments;
pub mod regions;
pub mod report;
