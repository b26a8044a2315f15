//! Experiment harness: configuration, deterministic multi-trial runners,
//! and CSV/JSON emission.
//!
//! Determinism contract: `(config, master seed)` fully determines every
//! emitted byte except the `wall_ms` column. Trials run on a worker pool but
//! own private RNG streams and trace buffers; aggregation merges by trial
//! index after all trials complete.

mod config;
mod convergence;
mod emit;
mod identification;
mod oracles;
mod sensitivity;

pub use config::{
    AlgorithmTag, ExperimentConfig, OutputFormat, SamplingMode, ScheduleOverride,
};
pub use convergence::{
    run_convergence, AggregateResult, CheckpointStat, ConvergenceOutcome,
};
pub use emit::{emit, equal_modulo_wall_ms, fmt_f64, parse_csv, Record};
pub use identification::{
    build_logistic_instance, logistic_profile, run_identification, IdentificationOutcome,
    IdentificationRow, IdentificationStats, SUPPORT_TOL,
};
pub use oracles::{BlindOracle, LogisticOracle, PhaseOracle};
pub use sensitivity::{run_stepsize_sensitivity, SensitivityOutcome, SensitivityRow};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The requested configuration violates a schedule precondition; the
    /// CLI maps this to exit code 2.
    #[error("schedule rejected: {0}")]
    Schedule(#[from] crate::solvers::ScheduleError),
    #[error("constant estimation failed: {0}")]
    Constants(#[from] crate::problems::ConstantsError),
    #[error("bad input data: {0}")]
    Idx(#[from] crate::problems::IdxError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}
