//! Desk-scale stand-in for a trajectory-predicting policy.
//!
//! The policy is an isotropic Gaussian over waypoints, so log-probabilities
//! and the KL to the reference are exact. It is trained with the same
//! rewards, group advantages and KL regularization a language model would
//! see.

mod ablation;
mod policy;

pub use ablation::{
    default_ground_truth, default_initial_mean, median, normalized_performance, run_ablation,
    run_simulation, summarize, write_outputs, LearningCurve, RewardVariant, SimConfig,
    SimulationPlan, SimulationSummary, StepRecord, VariantSummary,
};
pub use policy::{
    gaussian_kl, sample_group, update_policy, Sample, ToyPolicy, UpdateConfig, DEFAULT_LOG_SIGMA,
    MAX_LOG_SIGMA, MIN_LOG_SIGMA,
};
