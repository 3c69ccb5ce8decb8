//! Optimal social welfare as a maximum-weight perfect matching.

use thiserror::Error;

use crate::profile::{Matching, ValuationProfile};

/// Largest n accepted by [`brute_force_opt`].
pub const BRUTE_FORCE_MAX: usize = 9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchingError {
    #[error("brute force is limited to n <= {BRUTE_FORCE_MAX}, got {0}")]
    TooLarge(usize),
}

/// Hungarian algorithm (shortest augmenting paths with potentials) on the
/// cost matrix −a. O(n³).
pub fn max_weight_matching(profile: &ValuationProfile) -> (Matching, f64) {
    let n = profile.n();
    let cost = |i: usize, j: usize| -profile.get(i - 1, j - 1);
    // 1-based with a sentinel column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0, j) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    let matching = Matching::from_exact(assignment);
    let sw = matching.welfare(profile);
    (matching, sw)
}

/// Exhaustive maximum over all n! permutations.
pub fn brute_force_opt(profile: &ValuationProfile) -> Result<(Matching, f64), MatchingError> {
    let n = profile.n();
    if n > BRUTE_FORCE_MAX {
        return Err(MatchingError::TooLarge(n));
    }
    let welfare = |perm: &[usize]| perm.iter().enumerate().map(|(i, &j)| profile.get(i, j)).sum::<f64>();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (perm.clone(), welfare(&perm));
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            perm.swap(if i % 2 == 0 { 0 } else { c[i] }, i);
            let w = welfare(&perm);
            if w > best.1 {
                best = (perm.clone(), w);
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok((Matching::from_exact(best.0), best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{hard_instance, sample_uniform_profile, HardFamilyParams};
    use crate::profile::validate_unit_range;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn worked() -> ValuationProfile {
        validate_unit_range(&[vec![1.0, 0.6, 0.0], vec![1.0, 0.2, 0.0], vec![0.5, 1.0, 0.0]]).unwrap()
    }

    #[test]
    fn examples() {
        let eye = validate_unit_range(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (m, sw) = max_weight_matching(&eye);
        assert_eq!(m.assignment(), &[0, 1]);
        assert_eq!(sw, 2.0);
        assert_eq!(brute_force_opt(&eye).unwrap().1, 2.0);
        assert!((max_weight_matching(&worked()).1 - 2.0).abs() < 1e-12);
        assert!((brute_force_opt(&worked()).unwrap().1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identical_rows_give_row_sum() {
        let row = vec![1.0, 0.3, 0.7, 0.0, 0.25];
        let a = validate_unit_range(&vec![row.clone(); 5]).unwrap();
        assert!((max_weight_matching(&a).1 - row.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn brute_force_guard() {
        let a = sample_uniform_profile(10, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(brute_force_opt(&a), Err(MatchingError::TooLarge(10)));
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 3..=8 {
            for _ in 0..60 {
                let a = sample_uniform_profile(n, &mut rng).unwrap();
                let h = max_weight_matching(&a).1;
                let b = brute_force_opt(&a).unwrap().1;
                assert!((h - b).abs() <= 1e-9, "n={n}: {h} vs {b}");
            }
        }
    }

    #[test]
    fn dominates_random_permutations_and_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [5, 12, 30] {
            let a = sample_uniform_profile(n, &mut rng).unwrap();
            let (m, opt) = max_weight_matching(&a);
            assert!((m.welfare(&a) - opt).abs() < 1e-12);
            assert!(opt >= a.total() / n as f64 - 1e-9);
            assert!((1.0..=n as f64).contains(&opt));
            let mut perm: Vec<usize> = (0..n).collect();
            for _ in 0..100 {
                perm.shuffle(&mut rng);
                let w: f64 = perm.iter().enumerate().map(|(i, &j)| a.get(i, j)).sum();
                assert!(w <= opt + 1e-9);
            }
        }
    }

    #[test]
    fn monotone_in_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = rng.random_range(3..9);
            let a = sample_uniform_profile(n, &mut rng).unwrap();
            let before = max_weight_matching(&a).1;
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            let mut row = a.row(i).to_vec();
            if row[j] == 0.0 {
                continue; // keep the row's zero
            }
            row[j] = (row[j] + rng.random::<f64>() * 0.5).min(1.0);
            let b = a.with_row(i, &row).unwrap();
            assert!(max_weight_matching(&b).1 >= before - 1e-12);
        }
    }

    #[test]
    fn hard_instance_optimum() {
        // ⌈√n⌉ flexible agents can take items 1..⌈√n⌉, each worth about 1
        let a = hard_instance(HardFamilyParams::new(64, 1e-6).unwrap()).unwrap();
        assert!((max_weight_matching(&a).1 - 8.0).abs() < 1e-3);
    }
}
