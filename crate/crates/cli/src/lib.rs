//! Configuration, scenario presets, output formats and experiment drivers
//! for the `tdse` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod scenario;
pub mod snapshot;

pub use config::{parse_config, RunConfig};
pub use error::{CliError, Result};
