//! Command-line front end: config files, SVG plots and command orchestration.
//!
//! Each command computes all of its outputs in memory first and writes them
//! at the end, so a failed run leaves no partial files behind.

pub mod config;
pub mod run;
pub mod svg;

pub use config::{parse_config, parse_matrix, Command, ConfigError, RunConfig};
pub use run::{
    compute_outputs, main_with_args, parse_args, run_command, write_outputs, CliError, Invocation,
    EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, USAGE,
};
pub use svg::{render_svg, PlotKind, PlotSpec, Series};
