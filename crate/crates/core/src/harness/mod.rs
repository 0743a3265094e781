//! Configuration, orchestration and persistence behind the CLI.

pub mod config;
pub mod data_file;
pub mod manifest;
pub mod run;
pub mod tables;
pub mod verify;

pub use config::{ExperimentConfig, VerifySettings};
pub use manifest::RunManifest;
pub use run::{run_command, write_run, Command, RunOutput};
pub use verify::{verify_conditions, ConditionEntry, ConditionReport, Status};
