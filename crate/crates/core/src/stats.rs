//! Streaming mean/variance with a deterministic merge.

use serde::{Deserialize, Serialize};

/// Running (count, mean, M2) triple.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Summary {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn of(xs: &[f64]) -> Self {
        tree_reduce(&xs.iter().map(|&x| Summary { count: 1, mean: x, m2: 0.0 }).collect::<Vec<_>>())
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&self, other: &Summary) -> Summary {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Summary {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    /// Unbiased sample variance; 0 for fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Pairwise reduction whose shape depends only on the slice length.
pub fn tree_reduce(parts: &[Summary]) -> Summary {
    match parts.len() {
        0 => Summary::default(),
        1 => parts[0],
        len => {
            let (l, r) = parts.split_at(len / 2);
            tree_reduce(l).merge(&tree_reduce(r))
        }
    }
}

/// Standard error of an empirical proportion.
pub fn binomial_stderr(p: f64, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Least-squares slope of y on x.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
