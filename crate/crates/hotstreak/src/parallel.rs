//! Multi-threaded execution. Results are identical to the sequential
//! routines in `hotstreak_core` for any thread count.

use hotstreak_core::analysis::{batch_plan, run_unit, ConfigGrid, Observation, ObservationResult};
use hotstreak_core::resampling::{permutation_null_range, NullDistribution, NullKind, TestConfig};
use hotstreak_core::Error;
use rayon::prelude::*;

const CHUNK: u64 = 1024;

fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool")
}

/// [`hotstreak_core::analysis::batch_analyze`] across `threads` workers
/// (`None` for rayon's default).
pub fn par_batch_analyze(
    dataset: &[Observation],
    grid: &ConfigGrid,
    threads: Option<usize>,
) -> Result<Vec<ObservationResult>, Error> {
    let plan = batch_plan(dataset, grid)?;
    pool(threads).install(|| plan.par_iter().map(|unit| run_unit(dataset, unit)).collect())
}

/// [`hotstreak_core::resampling::permutation_null`] with the draws split into
/// chunks across workers.
pub fn par_permutation_null(
    shots: &[bool],
    cfg: &TestConfig,
    threads: Option<usize>,
) -> Result<NullDistribution, Error> {
    let chunks: Vec<_> = (0..cfg.resamples.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(cfg.resamples))
        .collect();
    pool(threads).install(|| {
        chunks
            .into_par_iter()
            .map(|range| permutation_null_range(shots, cfg, range))
            .try_reduce(
                || NullDistribution::empty(NullKind::MonteCarlo),
                |mut a, b| {
                    a.merge(&b);
                    Ok(a)
                },
            )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hotstreak_core::resampling::permutation_null;
    use hotstreak_core::{Depth, ShotString};

    #[test]
    fn chunked_null_matches_sequential() {
        let s: ShotString = "11011110010111111001110111101110111101010101".parse().unwrap();
        let cfg = TestConfig::new(Depth::new(2).unwrap()).with_resamples(5000);
        let seq = permutation_null(&s, &cfg).unwrap();
        for threads in [1, 3, 8] {
            assert_eq!(par_permutation_null(&s, &cfg, Some(threads)).unwrap(), seq);
        }
    }
}
