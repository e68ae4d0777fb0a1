//! Streak statistics for binary outcome sequences.
//!
//! The crate computes the conditional-streak statistic `t_k` (hit rate after
//! `k` consecutive hits minus hit rate after `k` consecutive misses) and its two
//! components, builds null distributions for them by permutation, Bernoulli
//! simulation or exhaustive enumeration, and turns the results into p-values,
//! summaries and histograms.
//!
//! Everything here is `no_std` (with `alloc`). File formats, parallel batch
//! execution and the command-line tool live in the `hotstreak` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
mod error;
pub mod resampling;
pub mod seed;
mod shots;
pub mod stats;

pub use error::Error;
pub use shots::{Outcome, ParseShotsError, ShotString};
pub use stats::{
    components, conditional_counts, t_k, t_k_hit, t_k_miss, Components, ConditionalCount, Depth, Fraction, StatValue,
    Statistic,
};
