//! Command-line companion of `chaingeo-core`: JSON instance configs,
//! instance bundles, verification suites and reports.

pub mod bundle;
pub mod config;
mod error;
pub mod instance;
pub mod report;
pub mod structure;
pub mod verify;

pub use bundle::Bundle;
pub use config::{InstanceConfig, Kind};
pub use error::{CliError, CliResult};
pub use instance::{Instance, InstanceSummary};
pub use report::{Check, Format, Report};
pub use verify::{verify, Suite};
