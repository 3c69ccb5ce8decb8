//! Ratio estimators, the experiment runner and its seeding scheme.

mod estimators;
mod experiment;
pub mod seeding;

use std::path::PathBuf;

use thiserror::Error;

pub use estimators::{
    bayesian_from_samples, default_candidates, estimate_average_ratio, estimate_bayesian_ratio,
    estimate_smoothed_ratio, evaluate_instance, smoothed_ratio_search, summarize_ratios, uniform_instance_samples,
    worst_family_sweep, AverageRun, BayesianRun, CandidateSearch, InstanceSample, MeanWithError, RatioEstimate,
    SmoothedRun, WorstRow, WorstSweep,
};
pub use experiment::{
    run_experiment, samples_csv, ExperimentConfig, ExperimentKind, ExperimentOutput, Sizes, DEFAULT_C_WC,
    DEFAULT_PERTURBATIONS, DEFAULT_SAMPLED_ORDERINGS,
};

use crate::bounds::BoundsError;
use crate::generate::GenerateError;
use crate::mechanisms::MechanismError;
use crate::profile::ProfileError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration field: {0}")]
    ConfigInvalid(String),
    #[error("cannot read or write {}", .0.display())]
    IoError(PathBuf),
    #[error("a size sweep needs at least 2 sizes, got {0}")]
    SizesTooFew(usize),
    #[error("candidate list is empty")]
    EmptyCandidates,
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}
