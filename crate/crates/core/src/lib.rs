//! Random priority against the welfare optimum in one-sided matching.
//!
//! The crate generates unit-range valuation profiles (uniform, a structured
//! hard family, and 0/1-preserving Gaussian perturbations), evaluates random
//! priority exactly or by sampling, computes the optimal matching, and
//! estimates smoothed, average-case and Bayesian approximation ratios next to
//! the closed-form bounds they are compared with.

pub mod bounds;
pub mod gauss;
pub mod generate;
pub mod harness;
pub mod matching;
pub mod mechanisms;
pub mod profile;
pub mod stats;

pub use generate::{hard_instance, perturb, sample_uniform_profile, HardFamilyParams, PerturbationSpec};
pub use matching::{brute_force_opt, max_weight_matching};
pub use mechanisms::{random_priority_exact, random_priority_sampled, rp_welfare, serial_dictatorship, RpMode};
pub use profile::{
    agent_utility, fixed_entries, matrix_norm, social_welfare, validate_unit_range, Allocation, Matching, NormKind,
    ValuationProfile,
};
