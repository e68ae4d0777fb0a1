//! Null distributions and p-values.
//!
//! A [`NullDistribution`] is a weighted multiset of defined statistic values
//! plus a count of draws on which the statistic was undefined. Monte Carlo
//! nulls weight every draw by one; exact nulls weight each value by the number
//! of arrangements producing it. Both merge by adding counts, so partial
//! distributions built on separate workers combine in any order.

mod exact;
mod monte_carlo;

use alloc::collections::BTreeMap;
use core::fmt;
use core::ops::Bound;

use num_rational::Ratio;

use crate::stats::{fraction_to_f64, Depth, Fraction, StatValue, Statistic};
use crate::Error;

pub use exact::{
    binomial, exact_null, exact_null_for, for_each_arrangement, null_mean_bias, MeanBias,
    DEFAULT_ENUMERATION_CAP,
};
pub use monte_carlo::{
    bernoulli_draw, bernoulli_null, bernoulli_null_range, component_draws, component_draws_range,
    permutation_draw, permutation_null, permutation_null_range,
};

pub const DEFAULT_RESAMPLES: u64 = 10_000;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 20_161_205;

/// How null strings are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NullModel {
    /// Uniform rearrangements of the observed string.
    Permutation,
    /// i.i.d. trials at the observation's own hit rate.
    BernoulliGame,
    /// i.i.d. trials at the subject's hit rate before this observation.
    BernoulliSeason,
}

impl NullModel {
    pub fn name(self) -> &'static str {
        match self {
            NullModel::Permutation => "perm",
            NullModel::BernoulliGame => "bern-game",
            NullModel::BernoulliSeason => "bern-season",
        }
    }
}

impl fmt::Display for NullModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub depth: Depth,
    pub statistic: Statistic,
    pub null_model: NullModel,
    pub resamples: u64,
    pub seed: u64,
    pub alpha: f64,
}

impl TestConfig {
    /// Permutation test of `t_k` with 10,000 resamples at the 5% level.
    pub fn new(depth: Depth) -> Self {
        Self {
            depth,
            statistic: Statistic::Tk,
            null_model: NullModel::Permutation,
            resamples: DEFAULT_RESAMPLES,
            seed: DEFAULT_SEED,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn with_statistic(mut self, statistic: Statistic) -> Self {
        self.statistic = statistic;
        self
    }

    pub fn with_null_model(mut self, null_model: NullModel) -> Self {
        self.null_model = null_model;
        self
    }

    pub fn with_resamples(mut self, resamples: u64) -> Self {
        self.resamples = resamples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.resamples == 0 {
            return Err(Error::ZeroResamples);
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NullKind {
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullDistribution {
    counts: BTreeMap<Fraction, u64>,
    undefined: u64,
    total: u64,
    kind: NullKind,
}

impl NullDistribution {
    pub fn empty(kind: NullKind) -> Self {
        Self {
            counts: BTreeMap::new(),
            undefined: 0,
            total: 0,
            kind,
        }
    }

    /// Adds `weight` draws with statistic value `value`.
    pub fn record(&mut self, value: StatValue, weight: u64) {
        match value {
            StatValue::Defined(v) => *self.counts.entry(v).or_insert(0) += weight,
            StatValue::Undefined => self.undefined += weight,
        }
        self.total += weight;
    }

    /// Multiset union. Kinds must agree.
    pub fn merge(&mut self, other: &NullDistribution) {
        debug_assert_eq!(self.kind, other.kind);
        for (&v, &w) in &other.counts {
            *self.counts.entry(v).or_insert(0) += w;
        }
        self.undefined += other.undefined;
        self.total += other.total;
    }

    pub fn kind(&self) -> NullKind {
        self.kind
    }

    /// Total weight: draws for Monte Carlo, arrangements for exact nulls.
    pub fn total_draws(&self) -> u64 {
        self.total
    }

    pub fn undefined_count(&self) -> u64 {
        self.undefined
    }

    pub fn defined_draws(&self) -> u64 {
        self.total - self.undefined
    }

    /// Distinct defined values in increasing order with their weights.
    pub fn values(&self) -> impl DoubleEndedIterator<Item = (Fraction, u64)> + '_ {
        self.counts.iter().map(|(&v, &w)| (v, w))
    }

    pub fn weight_of(&self, value: Fraction) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// Weight of defined values strictly greater than `value`.
    pub fn exceed_count(&self, value: Fraction) -> u64 {
        self.counts
            .range((Bound::Excluded(value), Bound::Unbounded))
            .map(|(_, &w)| w)
            .sum()
    }

    pub fn min(&self) -> Option<Fraction> {
        self.counts.keys().next().copied()
    }

    pub fn max(&self) -> Option<Fraction> {
        self.counts.keys().next_back().copied()
    }

    /// Most frequent defined value; ties go to the smaller value.
    pub fn mode(&self) -> Option<Fraction> {
        let mut best: Option<(Fraction, u64)> = None;
        for (v, w) in self.values() {
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((v, w));
            }
        }
        best.map(|(v, _)| v)
    }

    /// Weighted mean over defined values, exact.
    pub fn mean(&self) -> Option<Ratio<i128>> {
        let defined = self.defined_draws();
        if defined == 0 {
            return None;
        }
        let sum: Ratio<i128> = self
            .values()
            .map(|(v, w)| Ratio::new(i128::from(*v.numer()) * i128::from(w), i128::from(*v.denom())))
            .sum();
        Some(sum / i128::from(defined))
    }

    pub fn mean_f64(&self) -> Option<f64> {
        self.mean().map(|m| *m.numer() as f64 / *m.denom() as f64)
    }
}

/// Fraction of null draws whose statistic strictly exceeds the observed value.
///
/// Undefined draws stay in the denominator but never exceed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PValue {
    pub exceed_count: u64,
    pub defined_draws: u64,
    pub total_draws: u64,
}

impl PValue {
    pub fn value(&self) -> f64 {
        self.exceed_count as f64 / self.total_draws as f64
    }

    pub fn exact(&self) -> Ratio<u64> {
        Ratio::new(self.exceed_count, self.total_draws)
    }

    pub fn is_significant(&self, alpha: f64) -> bool {
        self.value() < alpha
    }
}

/// `None` when the observed statistic is undefined or the null is empty.
pub fn p_value(observed: StatValue, null: &NullDistribution) -> Option<PValue> {
    let observed = observed.fraction()?;
    if null.total_draws() == 0 {
        return None;
    }
    Some(PValue {
        exceed_count: null.exceed_count(observed),
        defined_draws: null.defined_draws(),
        total_draws: null.total_draws(),
    })
}

/// `p_value` for an observed value given as a plain number, e.g. one
/// outside the statistic's range.
pub fn p_value_f64(observed: f64, null: &NullDistribution) -> Option<PValue> {
    if null.total_draws() == 0 || observed.is_nan() {
        return None;
    }
    let exceed_count = null
        .values()
        .filter(|&(v, _)| fraction_to_f64(v) > observed)
        .map(|(_, w)| w)
        .sum();
    Some(PValue {
        exceed_count,
        defined_draws: null.defined_draws(),
        total_draws: null.total_draws(),
    })
}
