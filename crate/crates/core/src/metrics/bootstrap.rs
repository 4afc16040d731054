use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ExtReal, MetricsError};
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub metric: String,
    pub median: ExtReal,
    pub p35: ExtReal,
    pub p65: ExtReal,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
}

/// Linear-interpolation percentile (inclusive: `q = 0` is the minimum, `q = 100` the
/// maximum) of an ascending list. Infinities sort to the ends; interpolating between an
/// infinity and a finite value yields the infinity, and between `-inf` and `+inf` the
/// nearer endpoint.
pub fn percentile(sorted: &[ExtReal], q: f64) -> Result<ExtReal, MetricsError> {
    if sorted.is_empty() {
        return Err(MetricsError::Empty);
    }
    if !(0.0..=100.0).contains(&q) {
        return Err(MetricsError::Percentile(q));
    }
    let h = (sorted.len() - 1) as f64 * q / 100.0;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 {
        return Ok(sorted[lo]);
    }
    let (a, b) = (sorted[lo], sorted[lo + 1]);
    Ok(match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => ExtReal::Finite(x + frac * (y - x)),
        (ExtReal::NegInf, ExtReal::PosInf) => {
            if frac < 0.5 {
                a
            } else {
                b
            }
        }
        (ExtReal::Finite(_), inf) | (inf, ExtReal::Finite(_)) => inf,
        (same, _) => same,
    })
}

pub fn median(values: &[ExtReal]) -> Result<ExtReal, MetricsError> {
    let mut v = values.to_vec();
    v.sort();
    percentile(&v, 50.0)
}

/// Median over instances of `a_i - b_i` (the paper's instance-wise statistic).
/// Differences of equal infinities count as 0.
pub fn median_of_differences(a: &[ExtReal], b: &[ExtReal]) -> Result<ExtReal, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::Mismatch(a.len(), b.len()));
    }
    let diffs: Vec<ExtReal> = a.iter().zip(b).map(|(&x, &y)| sub(x, y)).collect();
    median(&diffs)
}

/// `median(a) - median(b)`; generally not equal to [`median_of_differences`].
pub fn difference_of_medians(a: &[ExtReal], b: &[ExtReal]) -> Result<ExtReal, MetricsError> {
    Ok(sub(median(a)?, median(b)?))
}

fn sub(x: ExtReal, y: ExtReal) -> ExtReal {
    match (x, y) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a - b),
        (a, b) if a == b => ExtReal::Finite(0.0),
        (ExtReal::Finite(_), b) => -b,
        (a, _) => a,
    }
}

/// Percentile bootstrap of the median: `b` resamples of the same size drawn with
/// replacement, the median of each, and the 50th/35th/65th percentiles of those `b`
/// medians. Infinite values stay in the ensemble.
pub fn bootstrap_percentiles(
    metric: &str,
    values: &[ExtReal],
    b: usize,
    seed: u64,
) -> Result<EnsembleSummary, MetricsError> {
    if values.is_empty() || b == 0 {
        return Err(MetricsError::Empty);
    }
    let n = values.len();
    let mut rng = substream(seed, 0);
    let mut sample = vec![ExtReal::Finite(0.0); n];
    let mut stats = Vec::with_capacity(b);
    for _ in 0..b {
        for x in sample.iter_mut() {
            *x = values[rng.gen_range(0..n)];
        }
        sample.sort_unstable();
        stats.push(percentile(&sample, 50.0)?);
    }
    stats.sort_unstable();
    Ok(EnsembleSummary {
        metric: metric.to_string(),
        median: percentile(&stats, 50.0)?,
        p35: percentile(&stats, 35.0)?,
        p65: percentile(&stats, 65.0)?,
        b,
        seed,
    })
}
