//! Scenario files, CSV reports and the experiment drivers behind the
//! `fracctl` command-line tool.
//!
//! The numerics live in [`fracctl_core`]; this crate adds what needs `std`:
//! reading TOML scenarios ([`config`]), writing deterministic CSV
//! ([`report`]) and running the named experiments in parallel
//! ([`commands`]).

pub mod commands;
pub mod config;
pub mod report;

pub use commands::Command;
pub use config::{parse_config, parse_scenario, scenario_from_str, ConfigError, FieldError};
pub use report::{config_hash, emit_csv, CsvTable};
