//! Empirical distributions and the two-sample Kolmogorov-Smirnov statistic.

use serde::Serialize;

/// Sorted sample multiset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    /// NaN samples are dropped.
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.retain(|x| !x.is_nan());
        samples.sort_by(f64::total_cmp);
        EmpiricalDistribution { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `#{s >= r} / n`.
    pub fn ccdf(&self, r: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let below = self.samples.partition_point(|&s| s < r);
        (self.samples.len() - below) as f64 / self.samples.len() as f64
    }

    /// `#{s <= x} / n`.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    /// Smallest sample `s` with `ccdf(s) <= p` among samples with at least
    /// `ceil(p n)` samples at or above it, i.e. the empirical upper `p` quantile.
    pub fn upper_quantile(&self, p: f64) -> Option<f64> {
        let n = self.samples.len();
        if n == 0 || !(0.0..=1.0).contains(&p) {
            return None;
        }
        let k = ((p * n as f64).ceil() as usize).clamp(1, n);
        Some(self.samples[n - k])
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// `sup_x |F_1(x) - F_2(x)|` for two empirical distributions.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (x, y) = (a.samples(), b.samples());
    if x.is_empty() || y.is_empty() {
        return if x.len() == y.len() { 0.0 } else { 1.0 };
    }
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / n - j as f64 / m).abs());
    }
    sup
}

/// Asymptotic two-sample KS critical value `c(alpha) sqrt((n + m) / (n m))`.
pub fn ks_critical_value(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
