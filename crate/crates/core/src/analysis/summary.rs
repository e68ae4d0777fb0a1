use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::Ratio;

use super::{Observation, ObservationResult, Verdict};
use crate::resampling::NullModel;
use crate::stats::{Depth, Statistic};

/// Per-subject shot totals and spread, one row of a season summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectSummary {
    pub subject: String,
    /// Distinct (date, opponent) pairs.
    pub games: usize,
    pub observations: usize,
    pub total_hits: u64,
    pub total_shots: u64,
    pub season_pct: Ratio<u64>,
    /// Mean of per-observation hit fractions.
    pub avg_game_pct: f64,
    /// Population standard deviation of per-observation hit fractions.
    pub stdev_game_pct: f64,
    pub avg_shots: f64,
    pub stdev_shots: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetSummary {
    /// Sorted by subject.
    pub subjects: Vec<SubjectSummary>,
}

fn mean_and_population_stdev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

/// Summary statistics for every subject in `dataset`. Empty strings
/// contribute shots but no hit fraction.
pub fn summarize_dataset(dataset: &[Observation]) -> DatasetSummary {
    let mut by_subject: BTreeMap<&str, Vec<&Observation>> = BTreeMap::new();
    for obs in dataset {
        by_subject.entry(obs.key.subject.as_str()).or_default().push(obs);
    }
    let subjects = by_subject
        .into_iter()
        .map(|(subject, obs)| {
            let games: BTreeSet<(&str, &str)> = obs
                .iter()
                .map(|o| (o.key.date.as_str(), o.key.opponent.as_str()))
                .collect();
            let total_hits: u64 = obs.iter().map(|o| o.shots.hits() as u64).sum();
            let total_shots: u64 = obs.iter().map(|o| o.shots.len() as u64).sum();
            let pcts: Vec<f64> = obs
                .iter()
                .filter(|o| !o.shots.is_empty())
                .map(|o| o.shots.hits() as f64 / o.shots.len() as f64)
                .collect();
            let shots: Vec<f64> = obs.iter().map(|o| o.shots.len() as f64).collect();
            let (avg_game_pct, stdev_game_pct) = mean_and_population_stdev(&pcts);
            let (avg_shots, stdev_shots) = mean_and_population_stdev(&shots);
            SubjectSummary {
                subject: subject.into(),
                games: games.len(),
                observations: obs.len(),
                total_hits,
                total_shots,
                season_pct: if total_shots == 0 {
                    Ratio::from_integer(0)
                } else {
                    Ratio::new(total_hits, total_shots)
                },
                avg_game_pct,
                stdev_game_pct,
                avg_shots,
                stdev_shots,
            }
        })
        .collect();
    DatasetSummary { subjects }
}

/// Significance tally for one subject under one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SignificanceCell {
    pub significant: usize,
    pub tested: usize,
    pub untestable: usize,
}

impl SignificanceCell {
    pub fn observations(&self) -> usize {
        self.tested + self.untestable
    }
}

/// Counts of significant observations by subject, statistic, null model and
/// depth.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignificanceTable {
    pub alpha: f64,
    pub cells: BTreeMap<(String, Statistic, NullModel, Depth), SignificanceCell>,
}

impl SignificanceTable {
    pub fn get(&self, subject: &str, statistic: Statistic, null_model: NullModel, depth: Depth) -> SignificanceCell {
        self.cells
            .get(&(subject.into(), statistic, null_model, depth))
            .copied()
            .unwrap_or_default()
    }

    pub fn total_significant(&self) -> usize {
        self.cells.values().map(|c| c.significant).sum()
    }
}

/// Tallies `results`, calling a tested result significant when its p-value is
/// below `alpha`.
pub fn significance_counts(results: &[ObservationResult], alpha: f64) -> SignificanceTable {
    let mut cells: BTreeMap<_, SignificanceCell> = BTreeMap::new();
    for r in results {
        let cell = cells
            .entry((r.key.subject.clone(), r.config.statistic, r.config.null_model, r.config.depth))
            .or_default();
        match &r.verdict {
            Verdict::Tested { p_value, .. } => {
                cell.tested += 1;
                if p_value.value() < alpha {
                    cell.significant += 1;
                }
            }
            Verdict::Untestable(_) => cell.untestable += 1,
        }
    }
    SignificanceTable { alpha, cells }
}
