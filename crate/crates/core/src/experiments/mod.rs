//! Run configurations, pipelines and deterministic artifacts.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{Command, RunConfig};
pub use run::{resolve_out_dir, run, Check, Outcome, RunReport};
