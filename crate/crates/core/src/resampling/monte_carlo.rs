use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{NullDistribution, NullKind, NullModel, TestConfig};
use crate::seed::DrawStreams;
use crate::stats::{components, Components};
use crate::Error;

/// Permutation null over `cfg.resamples` uniformly shuffled copies of `shots`.
pub fn permutation_null(shots: &[bool], cfg: &TestConfig) -> Result<NullDistribution, Error> {
    permutation_null_range(shots, cfg, 0..cfg.resamples)
}

/// The draws `range` of [`permutation_null`]. Merging the partial
/// distributions of a partition of `0..resamples` reproduces the full one.
pub fn permutation_null_range(
    shots: &[bool],
    cfg: &TestConfig,
    range: Range<u64>,
) -> Result<NullDistribution, Error> {
    cfg.validate()?;
    if cfg.null_model != NullModel::Permutation {
        return Err(Error::WrongNullModel(cfg.null_model.name()));
    }
    if shots.is_empty() {
        return Err(Error::EmptyString);
    }
    let streams = DrawStreams::new(cfg.seed);
    let mut buf = shots.to_vec();
    let mut null = NullDistribution::empty(NullKind::MonteCarlo);
    for i in range {
        permute_into(shots, &streams, i, &mut buf);
        null.record(cfg.statistic.evaluate(&buf, cfg.depth), 1);
    }
    Ok(null)
}

fn permute_into(shots: &[bool], streams: &DrawStreams, index: u64, buf: &mut [bool]) {
    buf.copy_from_slice(shots);
    buf.shuffle(&mut streams.stream(index));
}

fn bernoulli_into(p: f64, streams: &DrawStreams, index: u64, buf: &mut [bool]) {
    let mut rng = streams.stream(index);
    for shot in buf.iter_mut() {
        *shot = rng.gen::<f64>() < p;
    }
}

/// The string used as permutation draw `index` under `seed`.
pub fn permutation_draw(shots: &[bool], seed: u64, index: u64) -> Vec<bool> {
    let mut buf = shots.to_vec();
    permute_into(shots, &DrawStreams::new(seed), index, &mut buf);
    buf
}

/// The string used as Bernoulli draw `index` under `seed`.
pub fn bernoulli_draw(n: usize, p: f64, seed: u64, index: u64) -> Vec<bool> {
    let mut buf = alloc::vec![false; n];
    bernoulli_into(p, &DrawStreams::new(seed), index, &mut buf);
    buf
}

/// Null from `cfg.resamples` strings of `n` independent Bernoulli(`p`) shots.
///
/// Shot `j` of a draw is a hit when its uniform variate on `[0, 1)` falls
/// below `p`.
pub fn bernoulli_null(n: usize, p: f64, cfg: &TestConfig) -> Result<NullDistribution, Error> {
    bernoulli_null_range(n, p, cfg, 0..cfg.resamples)
}

pub fn bernoulli_null_range(
    n: usize,
    p: f64,
    cfg: &TestConfig,
    range: Range<u64>,
) -> Result<NullDistribution, Error> {
    cfg.validate()?;
    if cfg.null_model == NullModel::Permutation {
        return Err(Error::WrongNullModel(cfg.null_model.name()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if n == 0 {
        return Err(Error::EmptyString);
    }
    let streams = DrawStreams::new(cfg.seed);
    let mut buf = alloc::vec![false; n];
    let mut null = NullDistribution::empty(NullKind::MonteCarlo);
    for i in range {
        bernoulli_into(p, &streams, i, &mut buf);
        null.record(cfg.statistic.evaluate(&buf, cfg.depth), 1);
    }
    Ok(null)
}

/// Per-draw `t_{k,hit}`, `t_{k,miss}` and `t_k` on the same permutations that
/// [`permutation_null`] would use with this seed.
pub fn component_draws(shots: &[bool], cfg: &TestConfig) -> Result<Vec<Components>, Error> {
    component_draws_range(shots, cfg, 0..cfg.resamples)
}

pub fn component_draws_range(
    shots: &[bool],
    cfg: &TestConfig,
    range: Range<u64>,
) -> Result<Vec<Components>, Error> {
    cfg.validate()?;
    if cfg.null_model != NullModel::Permutation {
        return Err(Error::WrongNullModel(cfg.null_model.name()));
    }
    if shots.is_empty() {
        return Err(Error::EmptyString);
    }
    let streams = DrawStreams::new(cfg.seed);
    let mut buf = shots.to_vec();
    Ok(range
        .map(|i| {
            permute_into(shots, &streams, i, &mut buf);
            components(&buf, cfg.depth)
        })
        .collect())
}
