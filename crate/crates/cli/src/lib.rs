//! Configuration, sweep runners and CSV output for the `qnd` command.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, ConfigBuilder, ConfigError, Mode, RunConfig};
pub use error::CliError;
pub use output::{emit_csv, parse_csv, SweepResult};
pub use run::{run, run_fig2, run_fig3, run_sweep};
