//! Serial dictatorship and random priority.
//!
//! Exact random priority is computed by a dynamic program over states
//! (agents already served, items already taken). A uniformly random ordering
//! is the same as picking the next agent uniformly among those not yet served,
//! so every ordering prefix that reaches a state contributes one integer count.
//! Allocation counts are accumulated as integers and divided by n! once.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{is_permutation, social_welfare, Allocation, Matching, ValuationProfile};
use crate::stats::Summary;

/// Default largest n for exact random priority.
pub const N_EXACT: usize = 10;

/// Hard ceiling for exact computation: n! must fit in a u64 and masks in a u32.
pub const N_EXACT_CEILING: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanismError {
    #[error("ordering is not a permutation of the {0} agents")]
    NotAPermutation(usize),
    #[error("n = {n} is too large for exact random priority (limit {limit})")]
    TooLargeForExact { n: usize, limit: usize },
    #[error("need at least 2 sampled orderings, got {0}")]
    InvalidSampleCount(usize),
}

/// How random priority welfare is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpMode {
    Exact,
    Sampled(usize),
}

impl fmt::Display for RpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RpMode::Exact => f.write_str("exact"),
            RpMode::Sampled(m) => write!(f, "sampled:{m}"),
        }
    }
}

impl FromStr for RpMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exact" => Ok(RpMode::Exact),
            other => other
                .strip_prefix("sampled:")
                .and_then(|m| m.parse().ok())
                .map(RpMode::Sampled)
                .ok_or_else(|| format!("bad rp mode `{other}` (expected exact or sampled:M)")),
        }
    }
}

impl Serialize for RpMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RpMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Precomputed preference lists for repeated serial-dictatorship runs.
#[derive(Debug, Clone)]
pub struct Dictatorship<'a> {
    profile: &'a ValuationProfile,
    prefs: Vec<usize>,
}

impl<'a> Dictatorship<'a> {
    pub fn new(profile: &'a ValuationProfile) -> Self {
        let prefs = profile.preference_lists().concat();
        Self { profile, prefs }
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    /// Best item of `agent` not yet taken (lowest index among ties).
    #[inline]
    fn pick(&self, agent: usize, taken: impl Fn(usize) -> bool) -> usize {
        let n = self.n();
        *self.prefs[agent * n..(agent + 1) * n]
            .iter()
            .find(|&&j| !taken(j))
            .expect("an item is always left for the agent")
    }

    /// Runs one ordering, writing the item of each agent into `assignment`.
    /// Returns the welfare. `taken` is scratch space of length n.
    pub fn run_into(&self, ordering: &[usize], taken: &mut [bool], assignment: &mut [usize]) -> f64 {
        taken.fill(false);
        let mut welfare = 0.0;
        for &agent in ordering {
            let item = self.pick(agent, |j| taken[j]);
            taken[item] = true;
            assignment[agent] = item;
            welfare += self.profile.get(agent, item);
        }
        welfare
    }

    pub fn welfare(&self, ordering: &[usize], taken: &mut [bool]) -> f64 {
        taken.fill(false);
        let mut welfare = 0.0;
        for &agent in ordering {
            let item = self.pick(agent, |j| taken[j]);
            taken[item] = true;
            welfare += self.profile.get(agent, item);
        }
        welfare
    }
}

/// Agents pick, in the given order, their favourite remaining item.
pub fn serial_dictatorship(
    profile: &ValuationProfile,
    ordering: &[usize],
) -> Result<Matching, MechanismError> {
    let n = profile.n();
    if ordering.len() != n || !is_permutation(ordering) {
        return Err(MechanismError::NotAPermutation(n));
    }
    let sd = Dictatorship::new(profile);
    let mut taken = vec![false; n];
    let mut assignment = vec![0; n];
    sd.run_into(ordering, &mut taken, &mut assignment);
    Ok(Matching::from_exact(assignment))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpExact {
    pub allocation: Allocation,
    pub sw: f64,
}

fn factorials(n: usize) -> Vec<u64> {
    let mut f = vec![1u64; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as u64;
    }
    f
}

fn check_exact_size(n: usize, limit: usize) -> Result<(), MechanismError> {
    let limit = limit.min(N_EXACT_CEILING);
    if n > limit {
        return Err(MechanismError::TooLargeForExact { n, limit });
    }
    Ok(())
}

fn exact_from_counts(profile: &ValuationProfile, counts: &[u64], total: u64) -> RpExact {
    let n = profile.n();
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let allocation = Allocation::from_flat(n, probs).expect("random priority yields a doubly stochastic matrix");
    let sw = social_welfare(profile, &allocation).expect("same dimension");
    RpExact { allocation, sw }
}

/// Exact random priority with the default size limit [`N_EXACT`].
pub fn random_priority_exact(profile: &ValuationProfile) -> Result<RpExact, MechanismError> {
    random_priority_exact_with_limit(profile, N_EXACT)
}

pub fn random_priority_exact_with_limit(
    profile: &ValuationProfile,
    limit: usize,
) -> Result<RpExact, MechanismError> {
    let n = profile.n();
    check_exact_size(n, limit)?;
    let sd = Dictatorship::new(profile);
    let fact = factorials(n);
    let mut counts = vec![0u64; n * n];

    // (served agents << 32 | taken items, number of ordering prefixes)
    let mut layer: Vec<(u64, u64)> = vec![(0, 1)];
    let mut next: Vec<(u64, u64)> = Vec::new();
    for depth in 0..n {
        let completions = fact[n - depth - 1];
        next.clear();
        for &(key, count) in &layer {
            let served = (key >> 32) as u32;
            let taken = key as u32;
            for agent in (0..n).filter(|&i| served & (1 << i) == 0) {
                let item = sd.pick(agent, |j| taken & (1 << j) != 0);
                counts[agent * n + item] += count * completions;
                let s2 = served | (1 << agent);
                let t2 = taken | (1 << item);
                next.push(((u64::from(s2) << 32) | u64::from(t2), count));
            }
        }
        next.sort_unstable_by_key(|&(key, _)| key);
        layer.clear();
        for &(key, count) in &next {
            match layer.last_mut() {
                Some((k, c)) if *k == key => *c += count,
                _ => layer.push((key, count)),
            }
        }
    }
    debug_assert_eq!(layer.len(), 1);
    debug_assert_eq!(layer[0].1, fact[n]);
    Ok(exact_from_counts(profile, &counts, fact[n]))
}

/// Exact random priority by walking all n! orderings (Heap's algorithm).
/// Same contract as [`random_priority_exact`]; used to cross-check it.
pub fn random_priority_enumerated(profile: &ValuationProfile) -> Result<RpExact, MechanismError> {
    let n = profile.n();
    check_exact_size(n, N_EXACT)?;
    let sd = Dictatorship::new(profile);
    let mut counts = vec![0u64; n * n];
    let mut taken = vec![false; n];
    let mut assignment = vec![0; n];
    let mut ordering: Vec<usize> = (0..n).collect();
    let mut tally = |ordering: &[usize]| {
        sd.run_into(ordering, &mut taken, &mut assignment);
        for (agent, &item) in assignment.iter().enumerate() {
            counts[agent * n + item] += 1;
        }
    };
    tally(&ordering);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            let swap_with = if i % 2 == 0 { 0 } else { c[i] };
            ordering.swap(swap_with, i);
            tally(&ordering);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(exact_from_counts(profile, &counts, factorials(n)[n]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpSample {
    pub sw_mean: f64,
    pub sw_stderr: f64,
}

/// Fisher–Yates shuffle of the identity ordering: for i = n−1 down to 1,
/// swap position i with a u32 draw on 0..=i.
pub fn random_ordering<R: Rng + ?Sized>(ordering: &mut [usize], rng: &mut R) {
    for (k, slot) in ordering.iter_mut().enumerate() {
        *slot = k;
    }
    for i in (1..ordering.len()).rev() {
        let j = rng.random_range(0..=i as u32) as usize;
        ordering.swap(i, j);
    }
}

/// Mean serial-dictatorship welfare over `m` uniformly random orderings.
pub fn random_priority_sampled<R: Rng + ?Sized>(
    profile: &ValuationProfile,
    m: usize,
    rng: &mut R,
) -> Result<RpSample, MechanismError> {
    if m < 2 {
        return Err(MechanismError::InvalidSampleCount(m));
    }
    let n = profile.n();
    let sd = Dictatorship::new(profile);
    let mut ordering = vec![0; n];
    let mut taken = vec![false; n];
    let mut acc = Summary::default();
    for _ in 0..m {
        random_ordering(&mut ordering, rng);
        acc.push(sd.welfare(&ordering, &mut taken));
    }
    Ok(RpSample { sw_mean: acc.mean, sw_stderr: acc.stderr() })
}

/// Random priority welfare and its standard error (0 in exact mode).
pub fn rp_welfare<R: Rng + ?Sized>(
    profile: &ValuationProfile,
    mode: RpMode,
    rng: &mut R,
) -> Result<(f64, f64), MechanismError> {
    match mode {
        RpMode::Exact => random_priority_exact(profile).map(|r| (r.sw, 0.0)),
        RpMode::Sampled(m) => random_priority_sampled(profile, m, rng).map(|r| (r.sw_mean, r.sw_stderr)),
    }
}
