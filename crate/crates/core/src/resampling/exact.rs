use alloc::vec;

use itertools::Itertools;
use num_rational::Ratio;

use super::{NullDistribution, NullKind, TestConfig};
use crate::stats::{Depth, Statistic};
use crate::Error;

/// Largest number of arrangements [`exact_null`] will enumerate by default.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// `C(n, k)`, or `None` if it does not fit in a `u64`.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    u64::try_from(acc).ok()
}

/// Calls `visit` once for every string of `length` shots with exactly `hits`
/// hits, in lexicographic order of the hit positions.
pub fn for_each_arrangement(
    length: usize,
    hits: usize,
    cap: u64,
    mut visit: impl FnMut(&[bool]),
) -> Result<u64, Error> {
    if hits > length {
        return Err(Error::InvalidHitCount { length, hits });
    }
    let count = binomial(length, hits).filter(|&c| c <= cap).ok_or(Error::CapExceeded {
        length,
        hits,
        cap,
    })?;
    let mut buf = vec![false; length];
    if hits == 0 {
        visit(&buf);
        return Ok(count);
    }
    for positions in (0..length).combinations(hits) {
        buf.iter_mut().for_each(|s| *s = false);
        for p in positions {
            buf[p] = true;
        }
        visit(&buf);
    }
    Ok(count)
}

/// Exact null of `statistic` over every arrangement of `hits` hits among
/// `length` shots, each arrangement weighted once.
pub fn exact_null_for(
    length: usize,
    hits: usize,
    depth: Depth,
    statistic: Statistic,
    cap: u64,
) -> Result<NullDistribution, Error> {
    let mut null = NullDistribution::empty(NullKind::Exact);
    for_each_arrangement(length, hits, cap, |arr| {
        null.record(statistic.evaluate(arr, depth), 1);
    })?;
    Ok(null)
}

/// Exact permutation null of `shots` under the default enumeration cap.
///
/// Never falls back to Monte Carlo; a [`Error::CapExceeded`] leaves that
/// decision to the caller.
pub fn exact_null(shots: &[bool], cfg: &TestConfig) -> Result<NullDistribution, Error> {
    if shots.is_empty() {
        return Err(Error::EmptyString);
    }
    let hits = shots.iter().filter(|&&s| s).count();
    exact_null_for(shots.len(), hits, cfg.depth, cfg.statistic, DEFAULT_ENUMERATION_CAP)
}

/// Expected statistic under the exchangeable null, over defined arrangements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeanBias {
    pub mean: Ratio<i128>,
    pub defined_arrangements: u64,
    pub arrangements: u64,
}

impl MeanBias {
    pub fn to_f64(&self) -> f64 {
        *self.mean.numer() as f64 / *self.mean.denom() as f64
    }
}

/// `Ok(None)` when no arrangement gives a defined statistic.
pub fn null_mean_bias(
    length: usize,
    hits: usize,
    depth: Depth,
    statistic: Statistic,
) -> Result<Option<MeanBias>, Error> {
    let null = exact_null_for(length, hits, depth, statistic, DEFAULT_ENUMERATION_CAP)?;
    Ok(null.mean().map(|mean| MeanBias {
        mean,
        defined_arrangements: null.defined_draws(),
        arrangements: null.total_draws(),
    }))
}
