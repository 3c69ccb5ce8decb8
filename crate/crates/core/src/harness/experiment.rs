//! Experiment configuration, dispatch and persistence.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::estimators::{
    bayesian_from_samples, default_candidates, estimate_average_ratio, smoothed_ratio_search, uniform_instance_samples,
    worst_family_sweep, InstanceSample, RatioEstimate,
};
use super::seeding::RNG_ID;
use super::HarnessError;
use crate::bounds::{
    average_case_c, kprime_lower_bound, lemma_average_tail_bound, lemma_smoothed_tail_bound, theorem_average_bound,
    theorem_smoothed_bound, BoundReport,
};
use crate::generate::{hard_instance, HardFamilyParams, PerturbationSpec};
use crate::mechanisms::{RpMode, N_EXACT};
use crate::profile::{NormKind, ValuationProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Average,
    Smoothed,
    Bayesian,
    Worstfamily,
    Bounds,
}

/// A single size or an ascending list of sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sizes {
    One(usize),
    Many(Vec<usize>),
}

impl Sizes {
    pub fn as_vec(&self) -> Vec<usize> {
        match self {
            Sizes::One(n) => vec![*n],
            Sizes::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub n: Option<Sizes>,
    #[serde(default)]
    pub instances: Option<usize>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub norm_kind: NormKind,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub rp_mode: Option<RpMode>,
    #[serde(default)]
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Perturbations per candidate (smoothed).
    #[serde(default)]
    pub perturbations: Option<usize>,
    /// Base profile CSV (smoothed); the hard family is used when absent.
    #[serde(default)]
    pub input: Option<PathBuf>,
    /// Tail exponent for the bound evaluations.
    #[serde(default)]
    pub c: Option<f64>,
    /// Constant of the √n worst-case ratio used by the smoothed bound.
    #[serde(default)]
    pub c_wc: Option<f64>,
    /// Worker threads; results do not depend on it.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_eps() -> f64 {
    HardFamilyParams::DEFAULT_EPS
}

pub const DEFAULT_PERTURBATIONS: usize = 500;
pub const DEFAULT_SAMPLED_ORDERINGS: usize = 1000;
pub const DEFAULT_C_WC: f64 = 1.0;

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            kind,
            n: None,
            instances: None,
            sigma: None,
            norm_kind: NormKind::default(),
            eps: default_eps(),
            rp_mode: None,
            seed: 0,
            out_dir: out_dir.into(),
            perturbations: None,
            input: None,
            c: None,
            c_wc: None,
            workers: None,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|_| HarnessError::IoError(path.to_path_buf()))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::ConfigInvalid(format!("config: {e}")))
    }

    fn single_n(&self) -> Result<usize, HarnessError> {
        match &self.n {
            Some(Sizes::One(n)) if *n >= 2 => Ok(*n),
            Some(Sizes::Many(v)) if v.len() == 1 && v[0] >= 2 => Ok(v[0]),
            _ => Err(HarnessError::ConfigInvalid("n".into())),
        }
    }

    /// 10⁴ instances with exact RP up to n = 10, 10³ with sampled RP above.
    pub fn instances_for(&self, n: usize) -> usize {
        self.instances.unwrap_or(if n <= N_EXACT { 10_000 } else { 1_000 })
    }

    pub fn rp_mode_for(&self, n: usize) -> RpMode {
        self.rp_mode.unwrap_or(if n <= N_EXACT { RpMode::Exact } else { RpMode::Sampled(DEFAULT_SAMPLED_ORDERINGS) })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |f: &str| Err(HarnessError::ConfigInvalid(f.into()));
        if self.instances == Some(0) {
            return invalid("instances");
        }
        if self.perturbations == Some(0) {
            return invalid("perturbations");
        }
        if self.workers == Some(0) {
            return invalid("workers");
        }
        if matches!(self.rp_mode, Some(RpMode::Sampled(m)) if m < 2) {
            return invalid("rp_mode");
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return invalid("sigma");
            }
        }
        match self.kind {
            ExperimentKind::Average | ExperimentKind::Bayesian | ExperimentKind::Bounds => {
                self.single_n()?;
            }
            ExperimentKind::Smoothed => {
                if self.sigma.is_none() {
                    return invalid("sigma");
                }
                if self.input.is_none() {
                    self.single_n()?;
                }
            }
            ExperimentKind::Worstfamily => {
                let sizes = self.n.as_ref().map(Sizes::as_vec).unwrap_or_default();
                if sizes.len() < 2 {
                    return Err(HarnessError::SizesTooFew(sizes.len()));
                }
                if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] < 2 {
                    return invalid("n");
                }
            }
        }
        Ok(())
    }
}

/// Everything written by [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub report: Value,
    pub samples: Vec<InstanceSample>,
    pub report_path: PathBuf,
    pub samples_path: PathBuf,
}

fn estimate_json(name: &str, n: usize, e: &RatioEstimate) -> Value {
    json!({
        "name": name,
        "n": n,
        "mean": e.mean,
        "stderr": e.stderr,
        "ci95": [e.ci95.0, e.ci95.1],
        "samples": e.samples,
        "seed": e.seed,
        "rp_mode": e.rp_mode,
    })
}

/// Both branch formulas of the K′ lower bound evaluated at σ‖A‖ = 1.
fn kprime_boundary_check(n: usize) -> BoundReport {
    let at_one = kprime_lower_bound(n, 1.0);
    let above = kprime_lower_bound(n, 1.0 + 1e-12);
    let gap = (at_one.log_value - above.log_value).abs();
    BoundReport {
        name: "kprime_boundary_check".into(),
        params: BTreeMap::from([
            ("n".to_string(), n as f64),
            ("log_branch1".to_string(), at_one.log_value),
            ("log_branch2".to_string(), above.log_value),
        ]),
        value: gap,
        log_value: gap.ln(),
        valid: gap <= 1e-6 * at_one.log_value.abs().max(1.0),
    }
}

fn bound_reports(config: &ExperimentConfig) -> Result<Vec<BoundReport>, HarnessError> {
    let n = config.single_n()?;
    let mut out = Vec::new();
    let c = config.c.unwrap_or_else(|| average_case_c(n));
    let c_valid = c > 0.0 && c < 1.0;
    if c_valid {
        out.push(lemma_average_tail_bound(n, c)?);
    } else {
        out.push(BoundReport {
            name: "lemma_average_tail_bound".into(),
            params: BTreeMap::from([("n".to_string(), n as f64), ("c".to_string(), c)]),
            value: f64::NAN,
            log_value: f64::NAN,
            valid: false,
        });
    }
    if n >= 3 && c_valid {
        out.push(lemma_smoothed_tail_bound(n, c)?);
    }
    out.push(BoundReport {
        name: "theorem_average_bound".into(),
        params: BTreeMap::new(),
        value: theorem_average_bound(),
        log_value: theorem_average_bound().ln(),
        valid: true,
    });
    out.push(kprime_boundary_check(n));
    if let Some(sigma) = config.sigma {
        let hard = hard_instance(HardFamilyParams::new(n, config.eps)?)?;
        let spec = PerturbationSpec::new(sigma, config.norm_kind)?;
        let sigma_norm = spec.std_dev(&hard);
        out.push(kprime_lower_bound(n, sigma_norm));
        if n >= 3 {
            out.push(theorem_smoothed_bound(n, sigma, sigma_norm, config.c_wc.unwrap_or(DEFAULT_C_WC))?);
        }
    }
    Ok(out)
}

type KindOutput = (Vec<Value>, Vec<BoundReport>, Vec<InstanceSample>);

fn run_kind(config: &ExperimentConfig) -> Result<KindOutput, HarnessError> {
    let seed = config.seed;
    match config.kind {
        ExperimentKind::Average => {
            let n = config.single_n()?;
            let run = estimate_average_ratio(n, config.instances_for(n), config.rp_mode_for(n), seed)?;
            Ok((vec![estimate_json("average_ratio", n, &run.estimate)], vec![], run.samples))
        }
        ExperimentKind::Bayesian => {
            let n = config.single_n()?;
            let instances = config.instances_for(n);
            if instances < 2 {
                return Err(HarnessError::ConfigInvalid("instances".into()));
            }
            let rp_mode = config.rp_mode_for(n);
            let samples = uniform_instance_samples(n, instances, rp_mode, seed)?;
            let average = super::estimators::summarize_ratios(&samples, seed, rp_mode);
            let bayes = bayesian_from_samples(samples);
            let estimates = vec![
                json!({
                    "name": "bayesian_ratio",
                    "n": n,
                    "ratio": bayes.ratio,
                    "stderr": bayes.ratio_stderr,
                    "e_opt": bayes.e_opt,
                    "e_rp": bayes.e_rp,
                    "samples": instances,
                    "seed": seed,
                    "rp_mode": rp_mode,
                }),
                estimate_json("average_ratio", n, &average),
            ];
            Ok((estimates, vec![], bayes.samples))
        }
        ExperimentKind::Smoothed => {
            let sigma = config.sigma.ok_or_else(|| HarnessError::ConfigInvalid("sigma".into()))?;
            let spec = PerturbationSpec::new(sigma, config.norm_kind)?;
            let perturbations = config.perturbations.unwrap_or(DEFAULT_PERTURBATIONS);
            let uniform = config.instances.unwrap_or(0);
            let candidates = match &config.input {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|_| HarnessError::IoError(path.clone()))?;
                    let base = ValuationProfile::from_csv(&text)?;
                    let mut out = vec![base.clone()];
                    if uniform > 0 {
                        out.extend(default_candidates(base.n(), config.eps, uniform, seed)?.into_iter().skip(1));
                    }
                    out
                }
                None => default_candidates(config.single_n()?, config.eps, uniform, seed)?,
            };
            let n = candidates[0].n();
            let rp_mode = config.rp_mode_for(n);
            let search = smoothed_ratio_search(&candidates, &spec, perturbations, rp_mode, seed)?;
            let mut estimates = vec![json!({
                "name": "candidate_max",
                "argmax": search.argmax,
                "candidates": candidates.len(),
                "estimate": estimate_json("smoothed_ratio", n, &search.candidate_max),
            })];
            let mut samples = Vec::with_capacity(candidates.len() * perturbations);
            for (k, run) in search.runs.into_iter().enumerate() {
                let mut e = estimate_json("smoothed_ratio", n, &run.estimate);
                e["candidate"] = json!(k);
                e["sigma_norm"] = json!(spec.std_dev(&candidates[k]));
                estimates.push(e);
                samples.extend(run.samples.into_iter().map(|s| InstanceSample {
                    instance_id: k * perturbations + s.instance_id,
                    ..s
                }));
            }
            Ok((estimates, vec![], samples))
        }
        ExperimentKind::Worstfamily => {
            let sizes = config.n.as_ref().map(Sizes::as_vec).unwrap_or_default();
            let rp_mode = config.rp_mode.unwrap_or(RpMode::Sampled(DEFAULT_SAMPLED_ORDERINGS));
            let sweep = worst_family_sweep(&sizes, config.eps, rp_mode, seed)?;
            let estimates = vec![json!({
                "name": "worst_family_sweep",
                "rows": sweep.rows,
                "slope": sweep.slope,
                "eps": config.eps,
                "seed": seed,
                "rp_mode": rp_mode,
            })];
            let samples = sweep
                .rows
                .iter()
                .map(|r| InstanceSample {
                    instance_id: r.n,
                    sw_opt: r.sw_opt,
                    sw_rp: r.sw_rp,
                    sw_rp_stderr: r.sw_rp_stderr,
                    ratio: r.ratio,
                })
                .collect();
            Ok((estimates, vec![], samples))
        }
        ExperimentKind::Bounds => Ok((vec![], bound_reports(config)?, vec![])),
    }
}

pub fn samples_csv(samples: &[InstanceSample]) -> String {
    let mut out = String::from(InstanceSample::CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&s.csv_line());
        out.push('\n');
    }
    out
}

/// Runs the configured experiment and writes `report.json` and `samples.csv`
/// into `out_dir`. Apart from `wall_time_s`, both files are a pure function of
/// the configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let (estimates, bounds, samples) = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|_| HarnessError::ConfigInvalid("workers".into()))?
            .install(|| run_kind(config))?,
        None => run_kind(config)?,
    };
    let report = json!({
        "config": config,
        "seed": config.seed,
        "rng_id": RNG_ID,
        "version": env!("CARGO_PKG_VERSION"),
        "estimates": estimates,
        "bounds": bounds,
        "wall_time_s": start.elapsed().as_secs_f64(),
    });

    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|_| HarnessError::IoError(dir.clone()))?;
    let report_path = dir.join("report.json");
    let samples_path = dir.join("samples.csv");
    let text = serde_json::to_string_pretty(&report).map_err(|e| HarnessError::ConfigInvalid(format!("report: {e}")))?;
    fs::write(&report_path, text + "\n").map_err(|_| HarnessError::IoError(report_path.clone()))?;
    fs::write(&samples_path, samples_csv(&samples)).map_err(|_| HarnessError::IoError(samples_path.clone()))?;
    Ok(ExperimentOutput { report, samples, report_path, samples_path })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_roundtrip() {
        let mut c = ExperimentConfig::new(ExperimentKind::Worstfamily, "out");
        c.n = Some(Sizes::Many(vec![16, 64]));
        c.rp_mode = Some(RpMode::Sampled(100));
        c.norm_kind = NormKind::P(3.0);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
        let parsed: ExperimentConfig =
            serde_json::from_str(r#"{"kind":"average","n":8,"out_dir":"x","rp_mode":"exact"}"#).unwrap();
        assert_eq!(parsed.n, Some(Sizes::One(8)));
        assert_eq!(parsed.eps, 1e-6);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"kind":"average","out_dir":"x","bogus":1}"#).is_err());
    }

    #[test]
    fn defaults_follow_size() {
        let c = ExperimentConfig::new(ExperimentKind::Average, "x");
        assert_eq!(c.instances_for(10), 10_000);
        assert_eq!(c.instances_for(11), 1_000);
        assert_eq!(c.rp_mode_for(10), RpMode::Exact);
        assert_eq!(c.rp_mode_for(16), RpMode::Sampled(1000));
    }

    #[test]
    fn validation_errors() {
        let mut c = ExperimentConfig::new(ExperimentKind::Smoothed, "x");
        c.n = Some(Sizes::One(8));
        assert!(matches!(c.validate(), Err(HarnessError::ConfigInvalid(f)) if f == "sigma"));
        c.sigma = Some(-1.0);
        assert!(matches!(c.validate(), Err(HarnessError::ConfigInvalid(f)) if f == "sigma"));
        let mut w = ExperimentConfig::new(ExperimentKind::Worstfamily, "x");
        w.n = Some(Sizes::One(16));
        assert!(matches!(w.validate(), Err(HarnessError::SizesTooFew(1))));
        let a = ExperimentConfig::new(ExperimentKind::Average, "x");
        assert!(matches!(a.validate(), Err(HarnessError::ConfigInvalid(f)) if f == "n"));
    }

    #[test]
    fn kprime_branches_meet() {
        for n in [3, 16, 256] {
            assert!(kprime_boundary_check(n).valid);
        }
    }
}
