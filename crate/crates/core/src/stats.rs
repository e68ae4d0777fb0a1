//! The `t_k` family of conditional-streak statistics.
//!
//! A conditioning set is a run of `k` identical outcomes. It is *realized* when
//! another shot follows it and *unrealized* when the string ends first.
//! Unrealized sets carry no information about the next shot and are left out
//! of the conditional proportions. Overlapping runs count separately, so `111`
//! holds two `11` conditioning sets.

use core::cmp::Ordering;
use core::fmt;
use core::num::NonZeroUsize;

use num_rational::Ratio;

use crate::shots::Outcome;
use crate::Error;

/// Exact statistic values.
pub type Fraction = Ratio<i64>;

/// Conditioning depth `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Depth(NonZeroUsize);

impl Depth {
    pub fn new(k: usize) -> Result<Self, Error> {
        NonZeroUsize::new(k).map(Depth).ok_or(Error::ZeroDepth)
    }

    pub fn get(self) -> usize {
        self.0.get()
    }
}

impl TryFrom<usize> for Depth {
    type Error = Error;

    fn try_from(k: usize) -> Result<Self, Error> {
        Depth::new(k)
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Tallies of the conditioning sets for one outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ConditionalCount {
    /// Runs of `k` conditioning outcomes followed by at least one more shot.
    pub realized_sets: u32,
    /// Realized sets whose follower is a hit.
    pub successes: u32,
    /// 1 when the string ends on a qualifying run, else 0.
    pub unrealized_sets: u32,
}

impl ConditionalCount {
    /// Empirical hit rate after the conditioning run.
    pub fn proportion(&self) -> StatValue {
        if self.realized_sets == 0 {
            StatValue::Undefined
        } else {
            StatValue::Defined(Fraction::new(
                i64::from(self.successes),
                i64::from(self.realized_sets),
            ))
        }
    }
}

/// A statistic value, or `Undefined` when a needed conditioning set never
/// occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatValue {
    Defined(Fraction),
    Undefined,
}

impl StatValue {
    pub fn is_defined(&self) -> bool {
        matches!(self, StatValue::Defined(_))
    }

    pub fn fraction(&self) -> Option<Fraction> {
        match *self {
            StatValue::Defined(v) => Some(v),
            StatValue::Undefined => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.fraction().map(fraction_to_f64)
    }

    /// `self - rhs`, undefined if either side is.
    pub fn difference(self, rhs: StatValue) -> StatValue {
        match (self, rhs) {
            (StatValue::Defined(a), StatValue::Defined(b)) => StatValue::Defined(a - b),
            _ => StatValue::Undefined,
        }
    }

    /// Defined values order by magnitude; `Undefined` compares to nothing.
    pub fn partial_cmp_value(&self, other: &StatValue) -> Option<Ordering> {
        Some(self.fraction()?.cmp(&other.fraction()?))
    }
}

impl From<Fraction> for StatValue {
    fn from(v: Fraction) -> Self {
        StatValue::Defined(v)
    }
}

impl fmt::Display for StatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatValue::Defined(v) => write!(f, "{v}"),
            StatValue::Undefined => f.write_str("undefined"),
        }
    }
}

pub(crate) fn fraction_to_f64(v: Fraction) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// Which member of the `t_k` family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    /// `t_{k,hit} - t_{k,miss}`.
    Tk,
    /// Hit rate after `k` hits.
    TkHit,
    /// Hit rate after `k` misses.
    TkMiss,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Tk => "tk",
            Statistic::TkHit => "tk-hit",
            Statistic::TkMiss => "tk-miss",
        }
    }

    pub fn evaluate(self, shots: &[bool], depth: Depth) -> StatValue {
        match self {
            Statistic::Tk => t_k(shots, depth),
            Statistic::TkHit => t_k_hit(shots, depth),
            Statistic::TkMiss => t_k_miss(shots, depth),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Counts conditioning sets of `depth` consecutive `outcome`s.
///
/// Position `τ` (0-based, `τ >= k`) is a realized set when shots `τ-k..τ` all
/// equal `outcome`. When `depth >= shots.len()` every field is zero.
pub fn conditional_counts(shots: &[bool], depth: Depth, outcome: Outcome) -> ConditionalCount {
    let k = depth.get();
    let mut counts = ConditionalCount::default();
    if k >= shots.len() {
        return counts;
    }
    let target = outcome.is_hit();
    // length of the run of `target` ending just before the current position
    let mut run = 0usize;
    for &shot in shots {
        if run >= k {
            counts.realized_sets += 1;
            counts.successes += u32::from(shot);
        }
        run = if shot == target { run + 1 } else { 0 };
    }
    if run >= k {
        counts.unrealized_sets = 1;
    }
    counts
}

/// Hit and miss counts in one pass over the string.
pub(crate) fn both_counts(shots: &[bool], depth: Depth) -> (ConditionalCount, ConditionalCount) {
    let k = depth.get();
    let mut hit = ConditionalCount::default();
    let mut miss = ConditionalCount::default();
    if k >= shots.len() {
        return (hit, miss);
    }
    let mut hit_run = 0usize;
    let mut miss_run = 0usize;
    for &shot in shots {
        let s = u32::from(shot);
        if hit_run >= k {
            hit.realized_sets += 1;
            hit.successes += s;
        }
        if miss_run >= k {
            miss.realized_sets += 1;
            miss.successes += s;
        }
        if shot {
            hit_run += 1;
            miss_run = 0;
        } else {
            miss_run += 1;
            hit_run = 0;
        }
    }
    hit.unrealized_sets = u32::from(hit_run >= k);
    miss.unrealized_sets = u32::from(miss_run >= k);
    (hit, miss)
}

/// Hit rate following `k` consecutive hits.
pub fn t_k_hit(shots: &[bool], depth: Depth) -> StatValue {
    conditional_counts(shots, depth, Outcome::Hit).proportion()
}

/// Hit rate following `k` consecutive misses.
pub fn t_k_miss(shots: &[bool], depth: Depth) -> StatValue {
    conditional_counts(shots, depth, Outcome::Miss).proportion()
}

/// `t_k_hit - t_k_miss`.
pub fn t_k(shots: &[bool], depth: Depth) -> StatValue {
    let (hit, miss) = both_counts(shots, depth);
    hit.proportion().difference(miss.proportion())
}

/// All three statistics from a single scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Components {
    pub hit: StatValue,
    pub miss: StatValue,
    pub tk: StatValue,
}

pub fn components(shots: &[bool], depth: Depth) -> Components {
    let (hit, miss) = both_counts(shots, depth);
    let hit = hit.proportion();
    let miss = miss.proportion();
    Components {
        hit,
        miss,
        tk: hit.difference(miss),
    }
}
