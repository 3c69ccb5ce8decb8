//! Instance generators: i.i.d. uniform unit-range profiles, a structured hard
//! family, and the 0/1-preserving truncated Gaussian perturbation.
//!
//! Draw order is part of the reproducibility contract:
//! - `sample_uniform_profile`: for each row, the position of the 1 (u32 draw on
//!   `0..n`), the position of the 0 (u32 draw on `0..n-1`, shifted past the 1),
//!   then one open-interval uniform per remaining item in increasing column order.
//! - `perturb`: one uniform per non-fixed entry, row-major.

use rand::distr::Open01;
use rand::Rng;
use thiserror::Error;

use crate::gauss;
use crate::profile::{matrix_norm, NormKind, ProfileError, ValuationProfile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("instance size must be at least 2, got {0}")]
    InvalidSize(usize),
    #[error("invalid hard-family parameters: n = {n}, eps = {eps} (need 0 < eps <= 1/ceil(sqrt(n)))")]
    InvalidParams { n: usize, eps: f64 },
    #[error("perturbation size must be positive, got {0}")]
    InvalidSigma(f64),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Gaussian perturbation of size σ, scaled by the profile norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    sigma: f64,
    norm_kind: NormKind,
}

impl PerturbationSpec {
    pub fn new(sigma: f64, norm_kind: NormKind) -> Result<Self, GenerateError> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(GenerateError::InvalidSigma(sigma));
        }
        if let NormKind::P(p) = norm_kind {
            if !(p >= 1.0) {
                return Err(ProfileError::InvalidP(p).into());
            }
        }
        Ok(Self { sigma, norm_kind })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    /// Per-entry standard deviation s = σ·‖A‖.
    pub fn std_dev(&self, profile: &ValuationProfile) -> f64 {
        self.sigma * matrix_norm(profile, self.norm_kind).expect("norm kind validated in new")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardFamilyParams {
    pub n: usize,
    pub eps: f64,
}

impl HardFamilyParams {
    pub const DEFAULT_EPS: f64 = 1e-6;

    pub fn new(n: usize, eps: f64) -> Result<Self, GenerateError> {
        let params = Self { n, eps };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<(), GenerateError> {
        let k = ceil_sqrt(self.n);
        if self.n < 2 || !(self.eps > 0.0) || self.eps > 1.0 / k as f64 {
            return Err(GenerateError::InvalidParams { n: self.n, eps: self.eps });
        }
        Ok(())
    }

    /// Number of flexible agents, ⌈√n⌉.
    pub fn flexible_agents(&self) -> usize {
        ceil_sqrt(self.n)
    }
}

pub(crate) fn ceil_sqrt(n: usize) -> usize {
    let mut k = (n as f64).sqrt() as usize;
    while k * k < n {
        k += 1;
    }
    while k > 0 && (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    k
}

/// Draws a profile whose rows each hold one 1, one 0 and n−2 free U(0,1) values.
pub fn sample_uniform_profile<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<ValuationProfile, GenerateError> {
    if n < 2 {
        return Err(GenerateError::InvalidSize(n));
    }
    let mut values = Vec::with_capacity(n * n);
    for _ in 0..n {
        let top = rng.random_range(0..n as u32) as usize;
        let mut bottom = rng.random_range(0..(n - 1) as u32) as usize;
        if bottom >= top {
            bottom += 1;
        }
        for j in 0..n {
            values.push(if j == top {
                1.0
            } else if j == bottom {
                0.0
            } else {
                rng.sample::<f64, _>(Open01)
            });
        }
    }
    Ok(ValuationProfile::from_exact(n, values))
}

/// All agents share the item order 1 > 2 > … > n. The first ⌈√n⌉ agents value
/// items 2..⌈√n⌉ close to 1; everyone else values every item but the first
/// close to 0.
pub fn hard_instance(params: HardFamilyParams) -> Result<ValuationProfile, GenerateError> {
    params.validate()?;
    let HardFamilyParams { n, eps } = params;
    let k = params.flexible_agents();
    let low = |j: usize| eps * (n - j) as f64 / n as f64;
    let mut values = vec![0.0; n * n];
    for i in 1..=n {
        let row = &mut values[(i - 1) * n..i * n];
        row[0] = 1.0;
        for j in 2..n {
            row[j - 1] = if i <= k && j <= k { 1.0 - (j - 1) as f64 * eps } else { low(j) };
        }
    }
    Ok(ValuationProfile::from_exact(n, values))
}

/// Adds truncated Gaussian noise to every entry that is not exactly 0 or 1.
///
/// Each free entry a receives γ ~ N(0, s²) conditioned on a + γ ∈ [0, 1],
/// drawn by inverse CDF so that every entry consumes exactly one uniform.
pub fn perturb<R: Rng + ?Sized>(
    profile: &ValuationProfile,
    spec: &PerturbationSpec,
    rng: &mut R,
) -> ValuationProfile {
    let s = spec.std_dev(profile);
    let n = profile.n();
    let values = profile
        .as_slice()
        .iter()
        .map(|&a| {
            if a == 0.0 || a == 1.0 {
                a
            } else {
                let u: f64 = rng.sample(Open01);
                (a + truncated_normal_quantile(u, -a, 1.0 - a, s)).clamp(0.0, 1.0)
            }
        })
        .collect();
    ValuationProfile::from_exact(n, values)
}

/// Quantile `u` of N(0, s²) restricted to [lo, hi], with lo ≤ 0 ≤ hi.
///
/// The interval is reflected onto the side where most of it lies below zero
/// so that the CDF values stay in the well-conditioned lower tail.
pub fn truncated_normal_quantile(u: f64, lo: f64, hi: f64, s: f64) -> f64 {
    debug_assert!(lo <= hi);
    if lo + hi > 0.0 {
        return -truncated_normal_quantile(1.0 - u, -hi, -lo, s);
    }
    let p_lo = gauss::cdf(lo / s);
    let p_hi = gauss::cdf(hi / s);
    let p = p_lo + u * (p_hi - p_lo);
    (s * gauss::quantile(p)).clamp(lo, hi)
}
