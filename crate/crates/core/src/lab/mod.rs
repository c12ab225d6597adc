//! Instance generation and Monte Carlo experiments.
//!
//! Every experiment is a named entry in [`experiments`]; it draws its trials
//! from per-trial streams derived from one seed, so a report is reproducible
//! bit for bit from its parameters.

mod experiments;
mod generate;
mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mix::{derive_key, domain};
use crate::protocol::ProtocolError;

pub use experiments::{
    calibrate, experiments, run_experiment, sketch_sizes, ExperimentInfo, ExperimentParams,
};
pub use generate::{generate, Generator, Instance, InstanceSpec, ORACLE_LIMIT};
pub use stats::{loglog_slope, wilson_interval, ExperimentReport, TrialRow};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid instance: {0}")]
    InvalidSpec(String),
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Independent stream number `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_key(u128::from(seed), domain::LAB, trial))
}
