//! Command-line front end for the `tricrystal` junction solver: configuration files,
//! CSV/SVG output and the run manifest.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod svg;

pub use config::{parse_config, Command, Family, RunConfig};
pub use error::CliError;
pub use run::{run, RunOptions, RunSummary};
