//! Experiment runner around `permcast-core`: named scenarios, structured
//! configuration, deterministic parallel trial execution, and CSV/JSON
//! result emission.

pub mod config;
pub mod error;
pub mod matfile;
pub mod output;
pub mod scenario;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use output::{write_results, ScenarioResult};
pub use scenario::run_scenario;
