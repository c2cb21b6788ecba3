//! Command-line front end for `fmd-core`: argument parsing, figure presets
//! and the CSV/JSON table formats.

pub mod args;
pub mod error;
pub mod presets;
pub mod run;
pub mod table;

pub use error::{CliError, Result};
pub use run::{execute, run_command, Job, Report};
pub use table::{mass_table, predictive_table, read_mass, Cell, Format, Table};
