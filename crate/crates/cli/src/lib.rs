//! Experiment layer: graph-family generators, the test corpus, convergence
//! experiment orchestration, and the oracle verification suite.

pub mod corpus;
pub mod experiment;
pub mod families;

pub use experiment::{
    run_convergence, verify_suite, CheckResult, CheckStatus, ConvergenceReport,
    ExperimentConfig, ModeChoice, PairReport, VerifySummary,
};
pub use families::{generate, Family};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rankq_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
