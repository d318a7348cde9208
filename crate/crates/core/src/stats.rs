//! Distribution comparisons used by the checks: the one-sample
//! Kolmogorov-Smirnov test and total-variation distance.

use std::collections::BTreeMap;

/// Result of a one-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

impl KsResult {
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Compares `samples` with the continuous distribution function `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let n = samples.len();
    assert!(n > 0, "KS test needs samples");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = nf.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    KsResult { statistic, p_value: kolmogorov_survival(lambda), n }
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Exponential distribution function with the given rate.
pub fn exp_cdf(rate: f64) -> impl Fn(f64) -> f64 {
    move |x| if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() }
}

/// Total-variation distance between two probability vectors over the same
/// cells. Missing trailing cells count as zero.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (get(a, i) - get(b, i)).abs()).sum::<f64>()
}

/// Total-variation distance between the empirical laws of two samples.
pub fn empirical_total_variation<T: Ord + Clone>(a: &[T], b: &[T]) -> f64 {
    let mut cells: BTreeMap<T, (f64, f64)> = BTreeMap::new();
    let wa = 1.0 / a.len() as f64;
    let wb = 1.0 / b.len() as f64;
    for x in a {
        cells.entry(x.clone()).or_default().0 += wa;
    }
    for x in b {
        cells.entry(x.clone()).or_default().1 += wb;
    }
    0.5 * cells.values().map(|(pa, pb)| (pa - pb).abs()).sum::<f64>()
}

/// Probabilities of `Geom(1 - p)` on `{1, ..., n_max - 1}` plus the lumped
/// tail `P(X >= n_max) = p^(n_max - 1)`.
pub fn lumped_geometric(p: f64, n_max: u64) -> Vec<f64> {
    let mut out: Vec<f64> = (1..n_max).map(|n| (1.0 - p) * p.powi(n as i32 - 1)).collect();
    out.push(p.powi(n_max as i32 - 1));
    out
}
