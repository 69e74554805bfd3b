//! Chi-square tests and binomial intervals used by the experiments.

use std::collections::BTreeMap;
use std::hash::Hash;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareResult {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

pub fn histogram<K: Ord + Hash + Clone>(values: impl IntoIterator<Item = K>) -> BTreeMap<K, u64> {
    let mut out = BTreeMap::new();
    for v in values {
        *out.entry(v).or_insert(0) += 1;
    }
    out
}

fn p_value(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(0.0)
}

/// Goodness of fit of `observed` counts against `probs`; bins with expected
/// count below 5 are pooled.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquareResult {
    let total: u64 = observed.iter().sum();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * total as f64;
        if e < 5.0 {
            pool.0 += o as f64;
            pool.1 += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pool.1 > 0.0 {
        if pool.1 >= 5.0 || bins.is_empty() {
            bins.push(pool);
        } else {
            let last = bins.last_mut().expect("nonempty");
            last.0 += pool.0;
            last.1 += pool.1;
        }
    }
    let statistic = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1);
    ChiSquareResult { statistic, dof, p_value: p_value(statistic, dof) }
}

/// Two-sample homogeneity test on two histograms over the same key space;
/// bins whose pooled count is below 10 are merged.
pub fn chi_square_two_sample<K: Ord + Clone>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> ChiSquareResult {
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let (na, nb) = (a.values().sum::<u64>() as f64, b.values().sum::<u64>() as f64);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for k in keys {
        let (x, y) = (*a.get(k).unwrap_or(&0) as f64, *b.get(k).unwrap_or(&0) as f64);
        if x + y < 10.0 {
            pool.0 += x;
            pool.1 += y;
        } else {
            bins.push((x, y));
        }
    }
    if pool.0 + pool.1 > 0.0 {
        bins.push(pool);
    }
    let n = na + nb;
    let mut statistic = 0.0;
    for &(x, y) in &bins {
        let total = x + y;
        let (ea, eb) = (total * na / n, total * nb / n);
        statistic += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    let dof = bins.len().saturating_sub(1);
    ChiSquareResult { statistic, dof, p_value: p_value(statistic, dof) }
}

/// Normal-approximation interval for a proportion at the given confidence.
pub fn binomial_ci(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let half = z_score(confidence) * (p * (1.0 - p) / n).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

pub fn z_score(confidence: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + confidence / 2.0)
}
