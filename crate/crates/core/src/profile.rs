//! Valuation profiles, allocations and welfare accounting.
//!
//! Agents and items are indexed from 0 in the API. Error messages and reports
//! print them 1-based.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack accepted on the unit-range constraints for externally supplied data.
pub const UNIT_RANGE_SLACK: f64 = 1e-12;

/// Row/column sum tolerance for doubly stochastic matrices.
pub const STOCHASTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("matrix is not square (or has fewer than 2 rows)")]
    NotSquare,
    #[error("entry ({}, {}) = {value} is outside [0, 1]", .row + 1, .col + 1)]
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    #[error("row {} has no entry equal to 1", .0 + 1)]
    RowMissingOne(usize),
    #[error("row {} has no entry equal to 0", .0 + 1)]
    RowMissingZero(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("agent index {} out of range for n = {n}", .index + 1)]
    IndexOutOfRange { index: usize, n: usize },
    #[error("p-norm requires p >= 1, got {0}")]
    InvalidP(f64),
    #[error("row {} of the allocation sums to {sum}", .row + 1)]
    NotRowStochastic { row: usize, sum: f64 },
    #[error("column {} of the allocation sums to {sum}", .col + 1)]
    NotColumnStochastic { col: usize, sum: f64 },
    #[error("assignment is not a permutation of 1..={0}")]
    NotAPermutation(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Entrywise matrix norm used to scale perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NormKind {
    #[default]
    Frobenius,
    P(f64),
    Max,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Frobenius => f.write_str("fro"),
            NormKind::Max => f.write_str("max"),
            NormKind::P(p) => write!(f, "p:{p}"),
        }
    }
}

impl FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "fro" | "frobenius" => Ok(NormKind::Frobenius),
            "max" => Ok(NormKind::Max),
            other => {
                let p = other
                    .strip_prefix("p:")
                    .ok_or_else(|| format!("unknown norm `{other}` (expected fro, max or p:P)"))?;
                let p: f64 = p.parse().map_err(|_| format!("bad p in `{other}`"))?;
                if !(p >= 1.0) {
                    return Err(format!("p-norm requires p >= 1, got {p}"));
                }
                Ok(NormKind::P(p))
            }
        }
    }
}

impl Serialize for NormKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An n×n unit-range valuation matrix: every row has max 1 and min 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationProfile {
    n: usize,
    values: Vec<f64>,
}

/// Checks and normalizes an external matrix into a profile.
///
/// Values within [`UNIT_RANGE_SLACK`] of the bounds are accepted; the row
/// maximum and minimum are then snapped to exactly 1 and 0.
pub fn validate_unit_range(rows: &[Vec<f64>]) -> Result<ValuationProfile, ProfileError> {
    let n = rows.len();
    if n < 2 || rows.iter().any(|r| r.len() != n) {
        return Err(ProfileError::NotSquare);
    }
    let mut values = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let mut clean = Vec::with_capacity(n);
        for (j, &v) in row.iter().enumerate() {
            if !(-UNIT_RANGE_SLACK..=1.0 + UNIT_RANGE_SLACK).contains(&v) {
                return Err(ProfileError::EntryOutOfRange { row: i, col: j, value: v });
            }
            clean.push(v.clamp(0.0, 1.0));
        }
        let (jmax, max) = argmax(&clean);
        let (jmin, min) = argmin(&clean);
        if max < 1.0 - UNIT_RANGE_SLACK {
            return Err(ProfileError::RowMissingOne(i));
        }
        if min > UNIT_RANGE_SLACK {
            return Err(ProfileError::RowMissingZero(i));
        }
        clean[jmax] = 1.0;
        clean[jmin] = 0.0;
        values.extend(clean);
    }
    Ok(ValuationProfile { n, values })
}

fn argmax(row: &[f64]) -> (usize, f64) {
    row.iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, v)| if v > best.1 { (j, v) } else { best })
}

fn argmin(row: &[f64]) -> (usize, f64) {
    row.iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (j, v)| if v < best.1 { (j, v) } else { best })
}

impl ValuationProfile {
    /// Builds a profile from a row-major buffer that is unit-range by construction.
    pub(crate) fn from_exact(n: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), n * n);
        debug_assert!((0..n).all(|i| {
            let row = &values[i * n..(i + 1) * n];
            row.iter().all(|v| (0.0..=1.0).contains(v))
                && row.contains(&1.0)
                && row.contains(&0.0)
        }));
        Self { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, agent: usize, item: usize) -> f64 {
        self.values[agent * self.n + item]
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.values[agent * self.n..(agent + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Sum of all entries.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Returns a copy with one agent's row replaced, re-validated.
    pub fn with_row(&self, agent: usize, row: &[f64]) -> Result<Self, ProfileError> {
        if agent >= self.n {
            return Err(ProfileError::IndexOutOfRange { index: agent, n: self.n });
        }
        let mut rows = self.to_rows();
        rows[agent] = row.to_vec();
        validate_unit_range(&rows)
    }

    /// Per-agent item lists sorted by decreasing value, ties to the lower index.
    pub fn preference_lists(&self) -> Vec<Vec<usize>> {
        self.rows()
            .map(|row| {
                let mut items: Vec<usize> = (0..self.n).collect();
                items.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
                items
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# n={}\n", self.n);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|&v| format_sig17(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ProfileError> {
        let mut declared = None;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                if let Some(v) = header.trim().strip_prefix("n=") {
                    let n = v.trim().parse::<usize>().map_err(|e| ProfileError::Parse {
                        line: lineno + 1,
                        msg: e.to_string(),
                    })?;
                    declared = Some(n);
                }
                continue;
            }
            let row = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ProfileError::Parse { line: lineno + 1, msg: e.to_string() })?;
            rows.push(row);
        }
        if declared.is_some_and(|n| n != rows.len()) {
            return Err(ProfileError::NotSquare);
        }
        validate_unit_range(&rows)
    }
}

/// Positional decimal with 17 significant digits; parses back to the same f64.
pub fn format_sig17(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.16e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::new();
    if v < 0.0 {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

/// Positions holding exactly 0 or 1.
pub fn fixed_entries(profile: &ValuationProfile) -> BTreeSet<(usize, usize)> {
    let n = profile.n;
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let v = profile.get(i, j);
            v == 0.0 || v == 1.0
        })
        .collect()
}

/// Entrywise norm of the profile viewed as a vector of n² values.
pub fn matrix_norm(profile: &ValuationProfile, kind: NormKind) -> Result<f64, ProfileError> {
    let v = profile.as_slice();
    Ok(match kind {
        NormKind::Frobenius => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        NormKind::Max => v.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
        NormKind::P(p) => {
            if !(p >= 1.0) {
                return Err(ProfileError::InvalidP(p));
            }
            v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    })
}

/// A bijection agent → item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    assignment: Vec<usize>,
}

impl Matching {
    pub fn new(assignment: Vec<usize>) -> Result<Self, ProfileError> {
        if !is_permutation(&assignment) {
            return Err(ProfileError::NotAPermutation(assignment.len()));
        }
        Ok(Self { assignment })
    }

    pub(crate) fn from_exact(assignment: Vec<usize>) -> Self {
        debug_assert!(is_permutation(&assignment));
        Self { assignment }
    }

    pub fn item_of(&self, agent: usize) -> usize {
        self.assignment[agent]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn welfare(&self, profile: &ValuationProfile) -> f64 {
        self.assignment.iter().enumerate().map(|(i, &j)| profile.get(i, j)).sum()
    }
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
}

/// A doubly stochastic n×n matrix of assignment probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    n: usize,
    probs: Vec<f64>,
}

impl Allocation {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self, ProfileError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(ProfileError::NotSquare);
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if !(-STOCHASTIC_TOL..=1.0 + STOCHASTIC_TOL).contains(&x) {
                    return Err(ProfileError::EntryOutOfRange { row: i, col: j, value: x });
                }
            }
        }
        Self::from_flat(n, rows.concat())
    }

    pub(crate) fn from_flat(n: usize, probs: Vec<f64>) -> Result<Self, ProfileError> {
        let alloc = Self { n, probs };
        for i in 0..n {
            let sum: f64 = alloc.row(i).iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(ProfileError::NotRowStochastic { row: i, sum });
            }
        }
        for j in 0..n {
            let sum: f64 = (0..n).map(|i| alloc.get(i, j)).sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(ProfileError::NotColumnStochastic { col: j, sum });
            }
        }
        Ok(alloc)
    }

    pub fn identity(n: usize) -> Self {
        let mut probs = vec![0.0; n * n];
        for i in 0..n {
            probs[i * n + i] = 1.0;
        }
        Self { n, probs }
    }

    pub fn uniform(n: usize) -> Self {
        Self { n, probs: vec![1.0 / n as f64; n * n] }
    }

    pub fn from_matching(m: &Matching) -> Self {
        let n = m.assignment.len();
        let mut probs = vec![0.0; n * n];
        for (i, &j) in m.assignment.iter().enumerate() {
            probs[i * n + j] = 1.0;
        }
        Self { n, probs }
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Allocation, alpha: f64) -> Result<Self, ProfileError> {
        if self.n != other.n {
            return Err(ProfileError::DimensionMismatch(self.n, other.n));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        Ok(Self { n: self.n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, agent: usize, item: usize) -> f64 {
        self.probs[agent * self.n + item]
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.probs[agent * self.n..(agent + 1) * self.n]
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn stochastic_residual(&self) -> f64 {
        let n = self.n;
        let rows = (0..n).map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs());
        let cols = (0..n).map(|j| ((0..n).map(|i| self.get(i, j)).sum::<f64>() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }
}

/// Expected utility of one agent: row i of A dotted with row i of X.
pub fn agent_utility(
    profile: &ValuationProfile,
    alloc: &Allocation,
    agent: usize,
) -> Result<f64, ProfileError> {
    if profile.n != alloc.n {
        return Err(ProfileError::DimensionMismatch(profile.n, alloc.n));
    }
    if agent >= profile.n {
        return Err(ProfileError::IndexOutOfRange { index: agent, n: profile.n });
    }
    Ok(profile.row(agent).iter().zip(alloc.row(agent)).map(|(a, x)| a * x).sum())
}

/// Σ_ij a_ij·x_ij.
pub fn social_welfare(profile: &ValuationProfile, alloc: &Allocation) -> Result<f64, ProfileError> {
    if profile.n != alloc.n {
        return Err(ProfileError::DimensionMismatch(profile.n, alloc.n));
    }
    (0..profile.n).map(|i| agent_utility(profile, alloc, i)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn worked() -> ValuationProfile {
        validate_unit_range(&[
            vec![1.0, 0.6, 0.0],
            vec![1.0, 0.2, 0.0],
            vec![0.5, 1.0, 0.0],
        ])
        .unwrap()
    }

    fn eye2() -> ValuationProfile {
        validate_unit_range(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_unit_range(&[vec![1.0, 0.0], vec![0.0, 1.0]]).is_ok());
        let err = validate_unit_range(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap_err();
        assert_eq!(err, ProfileError::RowMissingZero(0));
        assert_eq!(err.to_string(), "row 1 has no entry equal to 0");
        assert_eq!(worked().n(), 3);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(validate_unit_range(&[vec![1.0, 0.0]]), Err(ProfileError::NotSquare));
        assert_eq!(validate_unit_range(&[vec![1.0], vec![0.0]]), Err(ProfileError::NotSquare));
        assert!(matches!(
            validate_unit_range(&[vec![1.0, 0.0], vec![1.2, 0.0]]),
            Err(ProfileError::EntryOutOfRange { row: 1, col: 0, .. })
        ));
        assert_eq!(
            validate_unit_range(&[vec![0.9, 0.0], vec![1.0, 0.0]]),
            Err(ProfileError::RowMissingOne(0))
        );
    }

    #[test]
    fn slack_is_snapped() {
        let p = validate_unit_range(&[vec![1.0 - 1e-13, 5e-13], vec![-1e-13, 1.0 + 1e-13]]).unwrap();
        assert_eq!(p.row(0), &[1.0, 0.0]);
        assert_eq!(p.row(1), &[0.0, 1.0]);
    }

    #[test]
    fn fixed_entry_examples() {
        let all: BTreeSet<_> = [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().collect();
        assert_eq!(fixed_entries(&eye2()), all);
        let h = fixed_entries(&worked());
        let want: BTreeSet<_> = [(0, 0), (0, 2), (1, 0), (1, 2), (2, 1), (2, 2)].into_iter().collect();
        assert_eq!(h, want);
        let degenerate =
            validate_unit_range(&[vec![1.0, 1.0, 0.0], vec![1.0, 0.5, 0.0], vec![0.0, 0.5, 1.0]]).unwrap();
        assert_eq!(fixed_entries(&degenerate).len(), 7);
    }

    #[test]
    fn norm_examples() {
        let fro = matrix_norm(&eye2(), NormKind::Frobenius).unwrap();
        assert!((fro - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(matrix_norm(&worked(), NormKind::Max).unwrap(), 1.0);
        let fro = matrix_norm(&worked(), NormKind::Frobenius).unwrap();
        assert!((fro - 3.65f64.sqrt()).abs() < 1e-12);
        assert!((fro - 1.91050).abs() < 1e-5);
        assert_eq!(matrix_norm(&worked(), NormKind::P(0.5)), Err(ProfileError::InvalidP(0.5)));
        let p1 = matrix_norm(&worked(), NormKind::P(1.0)).unwrap();
        assert!((p1 - 4.3).abs() < 1e-12);
    }

    #[test]
    fn welfare_examples() {
        let id = Allocation::identity(2);
        assert_eq!(social_welfare(&eye2(), &id).unwrap(), 2.0);
        assert_eq!(agent_utility(&eye2(), &id, 0).unwrap(), 1.0);
        let same = validate_unit_range(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let half = Allocation::new(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(social_welfare(&same, &half).unwrap(), 1.0);
        assert_eq!(agent_utility(&same, &half, 1).unwrap(), 0.5);
        let u = Allocation::uniform(3);
        assert!((social_welfare(&worked(), &u).unwrap() - worked().total() / 3.0).abs() < 1e-12);
        assert!((agent_utility(&worked(), &u, 2).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn welfare_errors() {
        assert_eq!(
            social_welfare(&worked(), &Allocation::identity(2)),
            Err(ProfileError::DimensionMismatch(3, 2))
        );
        assert!(matches!(
            agent_utility(&worked(), &Allocation::identity(3), 3),
            Err(ProfileError::IndexOutOfRange { index: 3, n: 3 })
        ));
    }

    #[test]
    fn allocation_rejects_non_stochastic() {
        assert!(matches!(
            Allocation::new(&[vec![0.5, 0.5], vec![0.5, 0.4]]),
            Err(ProfileError::NotRowStochastic { row: 1, .. })
        ));
        assert!(matches!(
            Allocation::new(&[vec![1.0, 0.0], vec![1.0, 0.0]]),
            Err(ProfileError::NotColumnStochastic { col: 0, .. })
        ));
        assert!(Matching::new(vec![0, 0]).is_err());
    }

    #[test]
    fn csv_roundtrip_worked() {
        let p = worked();
        let text = p.to_csv();
        assert!(text.starts_with("# n=3\n"));
        assert_eq!(ValuationProfile::from_csv(&text).unwrap(), p);
        assert_eq!(
            ValuationProfile::from_csv("# n=3\n1,0\n0,1\n"),
            Err(ProfileError::NotSquare)
        );
        assert!(matches!(
            ValuationProfile::from_csv("1,x\n0,1\n"),
            Err(ProfileError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn sig17_formatting() {
        assert_eq!(format_sig17(1.0), "1");
        assert_eq!(format_sig17(0.5), "0.5");
        assert_eq!(format_sig17(0.6), "0.59999999999999998");
        assert_eq!(format_sig17(1e-20), "0.0000000000000000000099999999999999995");
        assert_eq!(format_sig17(12.5), "12.5");
    }

    fn unit_range_rows(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        let row = (
            prop::collection::vec(0.0f64..=1.0, n),
            0..n,
            0..n - 1,
        )
            .prop_map(move |(mut r, hi, lo)| {
                let lo = if lo >= hi { lo + 1 } else { lo };
                r[hi] = 1.0;
                r[lo] = 0.0;
                r
            });
        prop::collection::vec(row, n)
    }

    fn profile_strategy() -> impl Strategy<Value = ValuationProfile> {
        (2usize..7)
            .prop_flat_map(unit_range_rows)
            .prop_map(|rows| validate_unit_range(&rows).unwrap())
    }

    proptest! {
        #[test]
        fn norms_at_least_one(p in profile_strategy(), q in 1.0f64..6.0) {
            for kind in [NormKind::Frobenius, NormKind::Max, NormKind::P(q)] {
                prop_assert!(matrix_norm(&p, kind).unwrap() >= 1.0);
            }
        }

        #[test]
        fn welfare_is_linear_and_bounded(p in profile_strategy(), alpha in 0.0f64..=1.0, seed in any::<u64>()) {
            let n = p.n();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.rotate_left((seed % n as u64) as usize);
            let x1 = Allocation::from_matching(&Matching::new(perm).unwrap());
            let x2 = Allocation::uniform(n);
            let mix = x1.mix(&x2, alpha).unwrap();
            prop_assert!(mix.stochastic_residual() <= STOCHASTIC_TOL);
            let lhs = social_welfare(&p, &mix).unwrap();
            let rhs = alpha * social_welfare(&p, &x1).unwrap() + (1.0 - alpha) * social_welfare(&p, &x2).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
            prop_assert!((0.0..=n as f64).contains(&lhs));
            for i in 0..n {
                let u = agent_utility(&p, &mix, i).unwrap();
                prop_assert!((0.0..=1.0 + 1e-12).contains(&u));
            }
        }

        #[test]
        fn csv_roundtrip(p in profile_strategy()) {
            prop_assert_eq!(ValuationProfile::from_csv(&p.to_csv()).unwrap(), p);
        }
    }
}
