//! Plot-ready data: p-value box plots and ECDFs, null histograms.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ObservationResult, Verdict};
use crate::resampling::{component_draws, NullDistribution, NullKind, NullModel, TestConfig};
use crate::stats::{components, fraction_to_f64, Depth, Fraction, StatValue, Statistic};
use crate::{Error, ShotString};

pub const DEFAULT_BINS: usize = 40;

/// Quantile of sorted data by linear interpolation between closest ranks
/// (position `(n - 1) q`).
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = libm::floor(pos) as usize;
    let hi = libm::ceil(pos) as usize;
    let frac = pos - lo as f64;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn five_number_summary(sorted: &[f64]) -> Option<FiveNumber> {
    Some(FiveNumber {
        min: *sorted.first()?,
        q1: quantile(sorted, 0.25)?,
        median: quantile(sorted, 0.5)?,
        q3: quantile(sorted, 0.75)?,
        max: *sorted.last()?,
    })
}

/// `(x_i, (i + 1) / n)` for sorted data.
pub fn ecdf(sorted: &[f64]) -> Vec<(f64, f64)> {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, (i + 1) as f64 / n))
        .collect()
}

/// p-value distribution of one subject under one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectPValues {
    pub subject: String,
    /// Sorted defined p-values.
    pub p_values: Vec<f64>,
    pub untestable: usize,
    /// `None` when no observation was testable.
    pub summary: Option<FiveNumber>,
    pub ecdf: Vec<(f64, f64)>,
}

/// Box-plot and ECDF data per subject for results matching the given
/// configuration.
pub fn pvalue_distribution_report(
    results: &[ObservationResult],
    statistic: Statistic,
    depth: Depth,
    null_model: NullModel,
) -> Vec<SubjectPValues> {
    let mut groups: BTreeMap<&str, (Vec<f64>, usize)> = BTreeMap::new();
    for r in results.iter().filter(|r| {
        r.config.statistic == statistic && r.config.depth == depth && r.config.null_model == null_model
    }) {
        let entry = groups.entry(r.key.subject.as_str()).or_default();
        match &r.verdict {
            Verdict::Tested { p_value, .. } => entry.0.push(p_value.value()),
            Verdict::Untestable(_) => entry.1 += 1,
        }
    }
    groups
        .into_iter()
        .map(|(subject, (mut ps, untestable))| {
            ps.sort_by(f64::total_cmp);
            SubjectPValues {
                subject: subject.into(),
                summary: five_number_summary(&ps),
                ecdf: ecdf(&ps),
                p_values: ps,
                untestable,
            }
        })
        .collect()
}

/// Binned null distribution with the observed value and the upper critical
/// region marked.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramReport {
    /// `bins + 1` equal-width edges spanning `[-1, 1]`.
    pub edges: Vec<f64>,
    /// Defined draws per bin; the last bin is closed on the right.
    pub counts: Vec<u64>,
    pub undefined_count: u64,
    pub total_draws: u64,
    pub observed: StatValue,
    pub alpha: f64,
    /// Smallest null value whose strictly-greater mass is at most `alpha`.
    /// The critical region is everything above it.
    pub critical_threshold: Option<Fraction>,
    /// Weight strictly above the threshold.
    pub critical_mass: u64,
    pub modal_value: Option<Fraction>,
    pub kind: NullKind,
}

fn bin_index(v: Fraction, bins: usize) -> usize {
    // floor((v + 1) / 2 * bins), with v = 1 folded into the last bin
    let scaled = (v + Fraction::from_integer(1)) * Fraction::from_integer(bins as i64) / Fraction::from_integer(2);
    (scaled.floor().to_integer().max(0) as usize).min(bins - 1)
}

pub fn null_histogram(null: &NullDistribution, observed: StatValue, alpha: f64, bins: usize) -> HistogramReport {
    let bins = bins.max(1);
    let edges = (0..=bins)
        .map(|i| -1.0 + 2.0 * i as f64 / bins as f64)
        .collect();
    let mut counts = alloc::vec![0u64; bins];
    for (v, w) in null.values() {
        counts[bin_index(v, bins)] += w;
    }
    let limit = alpha * null.total_draws() as f64;
    let mut critical_threshold = None;
    let mut critical_mass = 0;
    let mut above = 0u64;
    // walk down from the top; the threshold is the last value reached whose
    // strictly-greater mass is still within the limit
    for (v, w) in null.values().rev() {
        if above as f64 > limit {
            break;
        }
        critical_threshold = Some(v);
        critical_mass = above;
        above += w;
    }
    HistogramReport {
        edges,
        counts,
        undefined_count: null.undefined_count(),
        total_draws: null.total_draws(),
        observed,
        alpha,
        critical_threshold,
        critical_mass,
        modal_value: null.mode(),
        kind: null.kind(),
    }
}

/// Null histograms of `t_{k,hit}`, `t_{k,miss}` and `t_k` evaluated on the
/// same permutation draws.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentHistograms {
    pub hit: HistogramReport,
    pub miss: HistogramReport,
    pub tk: HistogramReport,
    pub hit_null: NullDistribution,
    pub miss_null: NullDistribution,
    pub tk_null: NullDistribution,
    /// Draws on which `t_k != t_{k,hit} - t_{k,miss}` with both defined.
    pub identity_violations: u64,
}

pub fn null_component_histograms(
    shots: &ShotString,
    cfg: &TestConfig,
    bins: usize,
) -> Result<ComponentHistograms, Error> {
    let draws = component_draws(shots, cfg)?;
    let mut hit_null = NullDistribution::empty(NullKind::MonteCarlo);
    let mut miss_null = NullDistribution::empty(NullKind::MonteCarlo);
    let mut tk_null = NullDistribution::empty(NullKind::MonteCarlo);
    let mut identity_violations = 0;
    for d in &draws {
        hit_null.record(d.hit, 1);
        miss_null.record(d.miss, 1);
        tk_null.record(d.tk, 1);
        if let (Some(h), Some(m)) = (d.hit.fraction(), d.miss.fraction()) {
            if d.tk != StatValue::Defined(h - m) {
                identity_violations += 1;
            }
        }
    }
    let observed = components(shots, cfg.depth);
    Ok(ComponentHistograms {
        hit: null_histogram(&hit_null, observed.hit, cfg.alpha, bins),
        miss: null_histogram(&miss_null, observed.miss, cfg.alpha, bins),
        tk: null_histogram(&tk_null, observed.tk, cfg.alpha, bins),
        hit_null,
        miss_null,
        tk_null,
        identity_violations,
    })
}

impl HistogramReport {
    pub fn observed_f64(&self) -> Option<f64> {
        self.observed.to_f64()
    }

    pub fn critical_threshold_f64(&self) -> Option<f64> {
        self.critical_threshold.map(fraction_to_f64)
    }
}
