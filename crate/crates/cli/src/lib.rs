//! Config-driven pipeline over the `qlayer-core` toolkit: parse a run
//! configuration, execute the enabled stages and emit reports.

pub mod commands;
pub mod config;
pub mod emit;
pub mod pipeline;

pub use config::{parse_config, stage_closure, ConfigError, RunConfig, Stage, Violation, ViolationKind};
pub use emit::emit;
pub use pipeline::{run, Outcome, RunReport, SCHEMA_ID};

/// Environment variable overriding the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "QLAYER_OUTPUT_DIR";

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const STAGE_ERROR: u8 = 1;
    pub const CONFIG_ERROR: u8 = 2;
}
