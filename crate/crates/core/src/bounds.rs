//! Closed-form distributional bounds: the Irwin–Hall CDF, tail bounds on
//! random-priority welfare, lower bounds on the truncated Gaussian mass K′,
//! and the finite-n smoothed and average-case ratio bounds.
//!
//! Every bound is evaluated in log space first. Values that do not fit in an
//! f64 are still reported through `log_value`.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss;
use crate::generate::PerturbationSpec;
use crate::profile::ValuationProfile;
use crate::stats::binomial_stderr;

/// Largest Irwin–Hall order evaluated with exact rational arithmetic.
pub const IRWIN_HALL_EXACT_MAX: u32 = 64;

/// Log-space slack when comparing K′ against its lower bound.
pub const KPRIME_LOG_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("Irwin-Hall order must be at least 1, got {0}")]
    InvalidM(u32),
    #[error("n = {0} is outside the range of this bound")]
    InvalidN(usize),
    #[error("c = {0} must lie in (0, 1)")]
    InvalidC(f64),
    #[error("sigma = {0} must be positive")]
    InvalidSigma(f64),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub value: f64,
    pub log_value: f64,
    pub valid: bool,
}

impl BoundReport {
    fn new(name: &str, params: &[(&str, f64)], log_value: f64, valid: bool) -> Self {
        Self {
            name: name.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            value: log_value.exp(),
            log_value,
            valid,
        }
    }

    /// The value underflowed to 0 although its logarithm is finite.
    pub fn underflow(&self) -> bool {
        self.value == 0.0 && self.log_value.is_finite()
    }

    pub fn overflow(&self) -> bool {
        self.value.is_infinite() && self.log_value.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfMethod {
    ExactRational,
    /// N(m/2, m/12); approximate.
    NormalApprox,
}

/// Pr[U₁ + … + U_m ≤ x] for i.i.d. U(0,1).
pub fn irwin_hall_cdf(x: f64, m: u32) -> Result<f64, BoundsError> {
    irwin_hall_cdf_with_method(x, m).map(|(p, _)| p)
}

/// Like [`irwin_hall_cdf`], also reporting how the value was obtained.
///
/// For m ≤ [`IRWIN_HALL_EXACT_MAX`] the alternating sum
/// (1/m!)·Σ_{k≤⌊x⌋} (−1)^k·C(m,k)·(x−k)^m is evaluated exactly over the
/// rationals (x is a dyadic rational) and rounded once.
pub fn irwin_hall_cdf_with_method(x: f64, m: u32) -> Result<(f64, CdfMethod), BoundsError> {
    if m == 0 {
        return Err(BoundsError::InvalidM(m));
    }
    if m > IRWIN_HALL_EXACT_MAX {
        let mf = f64::from(m);
        let p = gauss::cdf((x - mf / 2.0) / (mf / 12.0).sqrt());
        return Ok((p, CdfMethod::NormalApprox));
    }
    if x.is_nan() {
        return Ok((f64::NAN, CdfMethod::ExactRational));
    }
    if x <= 0.0 {
        return Ok((0.0, CdfMethod::ExactRational));
    }
    if x >= f64::from(m) {
        return Ok((1.0, CdfMethod::ExactRational));
    }
    let xr = BigRational::from_float(x).expect("finite x");
    let mut sum = BigRational::zero();
    let mut binom = BigInt::one();
    for k in 0..=(x.floor() as u32) {
        let term = BigRational::from_integer(binom.clone()) * (&xr - BigRational::from_integer(k.into())).pow(m as i32);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        binom = binom * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    let fact: BigInt = (1..=m).map(BigInt::from).product();
    let p = (sum / BigRational::from_integer(fact)).to_f64().unwrap_or(f64::NAN);
    Ok((p.clamp(0.0, 1.0), CdfMethod::ExactRational))
}

/// Pr[row sum ≤ x] for a unit-range row whose n−2 free entries are U(0,1).
pub fn shifted_unit_range_cdf(x: f64, n: usize) -> Result<f64, BoundsError> {
    match n {
        0 | 1 => Err(BoundsError::InvalidN(n)),
        2 => Ok(if x >= 1.0 { 1.0 } else { 0.0 }),
        _ => irwin_hall_cdf(x - 1.0, (n - 2) as u32),
    }
}

fn check_c(c: f64) -> Result<(), BoundsError> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(BoundsError::InvalidC(c))
    }
}

/// The exponent c with 1 − c = log_n(2e) + 2/(n − 2). Can fall outside (0, 1)
/// for small n.
pub fn average_case_c(n: usize) -> f64 {
    let nf = n as f64;
    1.0 - (2.0 * E).ln() / nf.ln() - 2.0 / (nf - 2.0)
}

/// Upper bound on Pr[SW_RP ≤ n^c] for uniform profiles:
/// (e²/√(2π))·√n·(2e/n^{1−c})^{n−2}. `valid` carries the side condition
/// (e²/√(2πn))·(2e/n^{1−c})^{n−2} < 1.
pub fn lemma_average_tail_bound(n: usize, c: f64) -> Result<BoundReport, BoundsError> {
    if n < 3 {
        return Err(BoundsError::InvalidN(n));
    }
    check_c(c)?;
    let nf = n as f64;
    let ln_base = (2.0 * E).ln() - (1.0 - c) * nf.ln();
    let ln_power = (nf - 2.0) * ln_base;
    let log_value = 2.0 - 0.5 * (2.0 * PI).ln() + 0.5 * nf.ln() + ln_power;
    let side = 2.0 - 0.5 * (2.0 * PI * nf).ln() + ln_power;
    Ok(BoundReport::new(
        "lemma_average_tail_bound",
        &[("n", nf), ("c", c), ("side_condition_log", side)],
        log_value,
        side < 0.0,
    ))
}

/// Upper bound on the fraction of perturbed profiles with SW_RP ≤ n^c:
/// (e^{2n}/(√(2π)·n))·(2e/n^{1−c})^{n(n−2)}. `valid` is false when the bound
/// exceeds 1 and is therefore vacuous.
pub fn lemma_smoothed_tail_bound(n: usize, c: f64) -> Result<BoundReport, BoundsError> {
    if n < 3 {
        return Err(BoundsError::InvalidN(n));
    }
    check_c(c)?;
    let nf = n as f64;
    let log_value = 2.0 * nf - ((2.0 * PI).sqrt() * nf).ln()
        + nf * (nf - 2.0) * ((2.0 * E).ln() - (1.0 - c) * nf.ln());
    Ok(BoundReport::new(
        "lemma_smoothed_tail_bound",
        &[("n", nf), ("c", c)],
        log_value,
        log_value <= 0.0,
    ))
}

/// Log of the K′ lower bound for `free` perturbed entries at s = σ‖A‖.
fn kprime_log_bound(free: usize, sigma_norm: f64) -> f64 {
    let free = free as f64;
    if sigma_norm <= 1.0 {
        free * (sigma_norm.ln() - 0.5)
    } else {
        -free / (2.0 * sigma_norm * sigma_norm)
    }
}

/// Lower bound on K′ = ∫ exp(−|Γ|²/(2σ²‖A‖²)) dΓ over perturbations that stay
/// in the profile's cell: (e^{−1/2}·σ‖A‖)^{n(n−2)} when σ‖A‖ ≤ 1, otherwise
/// exp(−n(n−2)/(2σ²‖A‖²)).
pub fn kprime_lower_bound(n: usize, sigma_norm: f64) -> BoundReport {
    let free = n * n.saturating_sub(2);
    let branch = if sigma_norm <= 1.0 { 1.0 } else { 2.0 };
    BoundReport::new(
        "kprime_lower_bound",
        &[("n", n as f64), ("sigma_norm", sigma_norm), ("branch", branch)],
        kprime_log_bound(free, sigma_norm),
        sigma_norm > 0.0,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPrimeEstimate {
    pub free_entries: usize,
    pub sigma_norm: f64,
    /// Probability that an untruncated perturbation keeps every free entry in [0, 1].
    pub acceptance: f64,
    pub log_acceptance: f64,
    /// ln K′ = ln acceptance + (free entries)·ln(σ‖A‖·√(2π)).
    pub log_kprime: f64,
    pub lower_bound: BoundReport,
    pub satisfies_bound: bool,
    pub empirical_acceptance: f64,
    pub empirical_stderr: f64,
    pub samples: usize,
}

/// Analytic K′ for one profile, checked against [`kprime_lower_bound`], with a
/// sampled estimate of the joint acceptance probability alongside.
pub fn kprime_monte_carlo<R: Rng + ?Sized>(
    profile: &ValuationProfile,
    spec: &PerturbationSpec,
    m: usize,
    rng: &mut R,
) -> Result<KPrimeEstimate, BoundsError> {
    const MIN_SAMPLES: usize = 1000;
    if m < MIN_SAMPLES {
        return Err(BoundsError::TooFewSamples { need: MIN_SAMPLES, got: m });
    }
    let s = spec.std_dev(profile);
    let free: Vec<f64> = profile.as_slice().iter().copied().filter(|&a| a != 0.0 && a != 1.0).collect();
    let log_acceptance: f64 = free.iter().map(|&a| gauss::ln_interval_prob(-a / s, (1.0 - a) / s)).sum();
    let log_kprime = log_acceptance + free.len() as f64 * (s * (2.0 * PI).sqrt()).ln();
    let log_bound = kprime_log_bound(free.len(), s);
    let mut lower_bound = kprime_lower_bound(profile.n(), s);
    if free.len() != profile.n() * (profile.n() - 2) {
        // degenerate profile: compare against the bound for its own free count
        lower_bound.params.insert("free_entries".into(), free.len() as f64);
        lower_bound.log_value = log_bound;
        lower_bound.value = log_bound.exp();
    }

    let accepted = (0..m)
        .filter(|_| {
            free.iter().all(|&a| {
                let g = s * gauss::quantile(rng.sample(Open01));
                (0.0..=1.0).contains(&(a + g))
            })
        })
        .count();
    let empirical = accepted as f64 / m as f64;

    Ok(KPrimeEstimate {
        free_entries: free.len(),
        sigma_norm: s,
        acceptance: log_acceptance.exp(),
        log_acceptance,
        log_kprime,
        satisfies_bound: log_kprime >= log_bound - KPRIME_LOG_SLACK,
        lower_bound,
        empirical_acceptance: empirical,
        empirical_stderr: binomial_stderr(empirical, m),
        samples: m,
    })
}

/// 1 + e.
pub fn theorem_average_bound() -> f64 {
    1.0 + E
}

/// Finite-n smoothed ratio bound.
///
/// `c_wc` is the constant of the O(√n) worst-case ratio. When 1/σ ≥ √n the
/// worst-case value c_wc·√n is returned; otherwise
/// 2e^{3/2}·e^{2/(n−2)}·(1/σ if σ‖A‖ ≤ 1 else 1) + c_wc·√n/(√(2π)·n).
pub fn theorem_smoothed_bound(
    n: usize,
    sigma: f64,
    sigma_norm: f64,
    c_wc: f64,
) -> Result<BoundReport, BoundsError> {
    if n < 3 {
        return Err(BoundsError::InvalidN(n));
    }
    if !(sigma > 0.0) {
        return Err(BoundsError::InvalidSigma(sigma));
    }
    let nf = n as f64;
    let (case, value) = if 1.0 / sigma >= nf.sqrt() {
        (0.0, c_wc * nf.sqrt())
    } else {
        let lead = 2.0 * E.powf(1.5) * (2.0 / (nf - 2.0)).exp();
        let tail = c_wc * nf.sqrt() / ((2.0 * PI).sqrt() * nf);
        if sigma_norm <= 1.0 {
            (1.0, lead / sigma + tail)
        } else {
            (2.0, lead + tail)
        }
    };
    Ok(BoundReport::new(
        "theorem_smoothed_bound",
        &[("n", nf), ("sigma", sigma), ("sigma_norm", sigma_norm), ("c_wc", c_wc), ("case", case)],
        value.ln(),
        true,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfCheck {
    pub empirical_prob: f64,
    pub stderr: f64,
    pub passes: bool,
}

/// Empirical Pr[SW_RP ≥ n/2]; passes when it is at least 1/2 − 3 binomial stderr.
pub fn lemma_half_check(sw_rp: &[f64], n: usize) -> Result<HalfCheck, BoundsError> {
    const MIN_SAMPLES: usize = 1000;
    if sw_rp.len() < MIN_SAMPLES {
        return Err(BoundsError::TooFewSamples { need: MIN_SAMPLES, got: sw_rp.len() });
    }
    let half = n as f64 / 2.0;
    let p = sw_rp.iter().filter(|&&w| w >= half).count() as f64 / sw_rp.len() as f64;
    let stderr = binomial_stderr(p, sw_rp.len());
    Ok(HalfCheck { empirical_prob: p, stderr, passes: p >= 0.5 - 3.0 * stderr })
}
