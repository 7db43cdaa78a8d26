//! Command-line harness: generate suites, run agents, ingest human data,
//! analyze and report.

pub mod analyze;
pub mod config;
pub mod extract;
pub mod generate;
pub mod human;
pub mod report;
pub mod run;
