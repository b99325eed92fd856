//! Library side of the `robust-mrac` command: scenario loading and the
//! subcommand implementations.

pub mod commands;
pub mod scenario;

pub use commands::{Status, EXIT_INPUT_ERROR};
pub use scenario::{load, Overrides, ScenarioFile, Setup};
