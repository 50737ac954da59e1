//! Instance generation, experiment runs and result tables.

mod experiment;
mod instance;
mod report;

pub use experiment::{
    aggregate, run_experiment, run_restarts, EncodingChoice, ExperimentConfig, ModeSnapshot, PenaltyOverrides,
    PreparedProblem, RestartOutcome,
};
pub use instance::{generate_instance, SizeParams};
pub use report::{emit, mean_std, parse_json, write_csv, write_json, BenchmarkRow, OutputFormat, RowStatus, CSV_COLUMNS};
