use crate::error::{Error, Result};
use crate::source::{sample_counts, substream, CountRecord};

pub const DEFAULT_RESAMPLES: usize = 1000;

/// Parametric Poisson bootstrap: standard deviation of `statistic` over
/// re-drawn count vectors whose means are the observed counts.
///
/// Resample `k` uses substream `k` of `seed`. Resamples on which the
/// statistic fails (e.g. a group total drops to zero) are skipped.
pub fn bootstrap_counts<F>(counts: &[u64], n_resamples: usize, seed: u64, mut statistic: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if n_resamples < 100 {
        return Err(Error::Domain(format!(
            "bootstrap needs at least 100 resamples, got {n_resamples}"
        )));
    }
    if counts.iter().all(|&c| c == 0) {
        return Ok(0.0);
    }
    let mut values = Vec::with_capacity(n_resamples);
    let mut buf = vec![0.0; counts.len()];
    for k in 0..n_resamples {
        let mut rng = substream(seed, k as u64);
        for (slot, &c) in buf.iter_mut().zip(counts) {
            *slot = sample_counts(c as f64, &mut rng) as f64;
        }
        if let Ok(v) = statistic(&buf) {
            values.push(v);
        }
    }
    if values.len() < 2 {
        return Err(Error::Numerical("bootstrap statistic failed on almost every resample".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}

/// Record-level form of [`bootstrap_counts`].
pub fn bootstrap_error<F>(records: &[CountRecord], n_resamples: usize, seed: u64, statistic: F) -> Result<f64>
where
    F: Fn(&[CountRecord]) -> Result<f64>,
{
    let counts: Vec<u64> = records.iter().map(|r| r.counts).collect();
    let mut scratch = records.to_vec();
    bootstrap_counts(&counts, n_resamples, seed, |drawn| {
        for (r, &c) in scratch.iter_mut().zip(drawn) {
            r.counts = c as u64;
        }
        statistic(&scratch)
    })
}
