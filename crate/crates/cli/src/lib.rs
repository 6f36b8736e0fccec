//! Configuration, mode drivers and report formats behind the `fex` binary.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{InstanceConfig, Mode, SCHEMA_VERSION};
pub use error::{CliError, Result};
pub use report::{format_sig, ReportBody, ReportDocument};
pub use run::{run, sample_points, RunOptions};
