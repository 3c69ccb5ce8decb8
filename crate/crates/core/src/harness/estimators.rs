//! Monte Carlo ratio estimators.
//!
//! Every task (instance, perturbation, family size) draws from its own
//! substream and results are collected in task order, so outputs do not
//! depend on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::seeding::{substream, TAG_CANDIDATES, TAG_INSTANCES, TAG_PERTURBATIONS, TAG_WORST};
use super::HarnessError;
use crate::generate::{hard_instance, perturb, sample_uniform_profile, HardFamilyParams, PerturbationSpec};
use crate::matching::max_weight_matching;
use crate::mechanisms::{rp_welfare, RpMode};
use crate::profile::ValuationProfile;
use crate::stats::{ols_slope, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub samples: usize,
    pub seed: u64,
    pub rp_mode: RpMode,
}

/// One row of `samples.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSample {
    pub instance_id: usize,
    pub sw_opt: f64,
    pub sw_rp: f64,
    pub sw_rp_stderr: f64,
    pub ratio: f64,
}

impl InstanceSample {
    pub const CSV_HEADER: &'static str = "instance_id,sw_opt,sw_rp,sw_rp_stderr,ratio";

    pub fn csv_line(&self) -> String {
        format!("{},{},{},{},{}", self.instance_id, self.sw_opt, self.sw_rp, self.sw_rp_stderr, self.ratio)
    }

    /// Delta-method variance of sw_opt / sw_rp from the RP sampling error.
    fn plug_in_variance(&self) -> f64 {
        (self.sw_opt / (self.sw_rp * self.sw_rp) * self.sw_rp_stderr).powi(2)
    }
}

/// SW_OPT, SW_RP and the plug-in ratio for one profile.
pub fn evaluate_instance<R: rand::Rng + ?Sized>(
    instance_id: usize,
    profile: &ValuationProfile,
    rp_mode: RpMode,
    rng: &mut R,
) -> Result<InstanceSample, HarnessError> {
    let (_, sw_opt) = max_weight_matching(profile);
    let (sw_rp, sw_rp_stderr) = rp_welfare(profile, rp_mode, rng)?;
    Ok(InstanceSample { instance_id, sw_opt, sw_rp, sw_rp_stderr, ratio: sw_opt / sw_rp })
}

/// Mean of per-instance ratios; sampled-RP uncertainty is added on top of
/// the across-instance variance.
pub fn summarize_ratios(samples: &[InstanceSample], seed: u64, rp_mode: RpMode) -> RatioEstimate {
    let ratios: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
    let across = Summary::of(&ratios);
    let plug_in = Summary::of(&samples.iter().map(InstanceSample::plug_in_variance).collect::<Vec<_>>());
    let count = samples.len() as f64;
    let stderr = (across.stderr().powi(2) + plug_in.mean / count).sqrt();
    RatioEstimate {
        mean: across.mean,
        stderr,
        ci95: (across.mean - 1.96 * stderr, across.mean + 1.96 * stderr),
        samples: samples.len(),
        seed,
        rp_mode,
    }
}

fn check_count(field: &str, count: usize) -> Result<(), HarnessError> {
    if count < 2 {
        return Err(HarnessError::ConfigInvalid(field.to_string()));
    }
    Ok(())
}

/// Instance `k` is drawn from substream k of the shared uniform-instance
/// stream, then the same substream feeds the RP ordering draws.
pub fn uniform_instance_samples(
    n: usize,
    instances: usize,
    rp_mode: RpMode,
    seed: u64,
) -> Result<Vec<InstanceSample>, HarnessError> {
    (0..instances)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, TAG_INSTANCES, k as u64);
            let profile = sample_uniform_profile(n, &mut rng)?;
            evaluate_instance(k, &profile, rp_mode, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageRun {
    pub estimate: RatioEstimate,
    pub samples: Vec<InstanceSample>,
}

/// E[SW_OPT / SW_RP] over i.i.d. uniform unit-range profiles.
pub fn estimate_average_ratio(
    n: usize,
    instances: usize,
    rp_mode: RpMode,
    seed: u64,
) -> Result<AverageRun, HarnessError> {
    check_count("instances", instances)?;
    let samples = uniform_instance_samples(n, instances, rp_mode, seed)?;
    Ok(AverageRun { estimate: summarize_ratios(&samples, seed, rp_mode), samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanWithError {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesianRun {
    /// E[SW_OPT] / E[SW_RP].
    pub ratio: f64,
    /// Delta-method stderr of the ratio over paired instances.
    pub ratio_stderr: f64,
    pub e_opt: MeanWithError,
    pub e_rp: MeanWithError,
    pub samples: Vec<InstanceSample>,
}

/// Ratio of expectations from the same instance stream as
/// [`estimate_average_ratio`] for equal arguments.
pub fn estimate_bayesian_ratio(
    n: usize,
    instances: usize,
    rp_mode: RpMode,
    seed: u64,
) -> Result<BayesianRun, HarnessError> {
    check_count("instances", instances)?;
    let samples = uniform_instance_samples(n, instances, rp_mode, seed)?;
    Ok(bayesian_from_samples(samples))
}

pub fn bayesian_from_samples(samples: Vec<InstanceSample>) -> BayesianRun {
    let opt = Summary::of(&samples.iter().map(|s| s.sw_opt).collect::<Vec<_>>());
    let rp = Summary::of(&samples.iter().map(|s| s.sw_rp).collect::<Vec<_>>());
    let ratio = opt.mean / rp.mean;
    // linearized residuals d_k = (opt_k − R·rp_k) / E[rp]
    let resid = Summary::of(&samples.iter().map(|s| (s.sw_opt - ratio * s.sw_rp) / rp.mean).collect::<Vec<_>>());
    BayesianRun {
        ratio,
        ratio_stderr: resid.stderr(),
        e_opt: MeanWithError { mean: opt.mean, stderr: opt.stderr() },
        e_rp: MeanWithError { mean: rp.mean, stderr: rp.stderr() },
        samples,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedRun {
    pub estimate: RatioEstimate,
    pub samples: Vec<InstanceSample>,
}

/// Expected ratio over 0/1-preserving perturbations of one profile.
///
/// Perturbation p uses substream p of the perturbation stream, so different
/// base profiles evaluated with the same seed see common random numbers.
pub fn estimate_smoothed_ratio(
    profile: &ValuationProfile,
    spec: &PerturbationSpec,
    perturbations: usize,
    rp_mode: RpMode,
    seed: u64,
) -> Result<SmoothedRun, HarnessError> {
    check_count("perturbations", perturbations)?;
    let samples = (0..perturbations)
        .into_par_iter()
        .map(|p| {
            let mut rng = substream(seed, TAG_PERTURBATIONS, p as u64);
            let perturbed = perturb(profile, spec, &mut rng);
            evaluate_instance(p, &perturbed, rp_mode, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SmoothedRun { estimate: summarize_ratios(&samples, seed, rp_mode), samples })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSearch {
    /// Index of the candidate with the largest mean (first on ties).
    pub argmax: usize,
    /// Only a lower bound on the smoothed ratio: the max over a finite set.
    pub candidate_max: RatioEstimate,
    pub runs: Vec<SmoothedRun>,
}

pub fn smoothed_ratio_search(
    candidates: &[ValuationProfile],
    spec: &PerturbationSpec,
    perturbations: usize,
    rp_mode: RpMode,
    seed: u64,
) -> Result<CandidateSearch, HarnessError> {
    if candidates.is_empty() {
        return Err(HarnessError::EmptyCandidates);
    }
    let runs = candidates
        .iter()
        .map(|c| estimate_smoothed_ratio(c, spec, perturbations, rp_mode, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let argmax = runs
        .iter()
        .enumerate()
        .fold(0, |best, (k, r)| if r.estimate.mean > runs[best].estimate.mean { k } else { best });
    Ok(CandidateSearch { argmax, candidate_max: runs[argmax].estimate, runs })
}

/// The hard-family instance at `n` followed by `uniform` random profiles.
pub fn default_candidates(
    n: usize,
    eps: f64,
    uniform: usize,
    seed: u64,
) -> Result<Vec<ValuationProfile>, HarnessError> {
    let mut out = vec![hard_instance(HardFamilyParams::new(n, eps)?)?];
    for k in 0..uniform {
        out.push(sample_uniform_profile(n, &mut substream(seed, TAG_CANDIDATES, k as u64))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstRow {
    pub n: usize,
    pub sw_opt: f64,
    pub sw_rp: f64,
    pub sw_rp_stderr: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstSweep {
    pub rows: Vec<WorstRow>,
    /// Least-squares slope of ln(ratio) against ln(n).
    pub slope: f64,
}

/// Unperturbed hard-family ratios across sizes. Size n draws from substream n.
pub fn worst_family_sweep(
    sizes: &[usize],
    eps: f64,
    rp_mode: RpMode,
    seed: u64,
) -> Result<WorstSweep, HarnessError> {
    if sizes.len() < 2 {
        return Err(HarnessError::SizesTooFew(sizes.len()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::ConfigInvalid("sizes".into()));
    }
    let rows = sizes
        .par_iter()
        .map(|&n| {
            let profile = hard_instance(HardFamilyParams::new(n, eps)?)?;
            let mut rng = substream(seed, TAG_WORST, n as u64);
            let s = evaluate_instance(n, &profile, rp_mode, &mut rng)?;
            Ok(WorstRow { n, sw_opt: s.sw_opt, sw_rp: s.sw_rp, sw_rp_stderr: s.sw_rp_stderr, ratio: s.ratio })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
    Ok(WorstSweep { slope: ols_slope(&xs, &ys), rows })
}
