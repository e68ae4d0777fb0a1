//! Batch testing over a dataset of observations.
//!
//! An observation is one subject's shot string for a game, or for one quarter
//! of a game. Each observation is tested under every configuration in a
//! [`ConfigGrid`]; each (observation, configuration) pair draws from its own
//! seed derived from the master seed and the pair's identity, so results do
//! not depend on batch order or how work is partitioned.

mod report;
mod summary;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::resampling::{
    bernoulli_null, p_value, permutation_null, NullModel, PValue, TestConfig, DEFAULT_ALPHA,
    DEFAULT_RESAMPLES, DEFAULT_SEED,
};
use crate::seed::derive_seed;
use crate::stats::{Depth, Fraction, StatValue, Statistic};
use crate::{Error, ShotString};

pub use report::{
    ecdf, five_number_summary, null_component_histograms, null_histogram, pvalue_distribution_report,
    quantile, ComponentHistograms, FiveNumber, HistogramReport, SubjectPValues, DEFAULT_BINS,
};
pub use summary::{
    significance_counts, summarize_dataset, DatasetSummary, SignificanceCell, SignificanceTable,
    SubjectSummary,
};

/// Observation window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    /// Quarter 1 to 4. Orders before `Game` within the same date.
    Quarter(u8),
    Game,
}

impl Scope {
    pub fn quarter(q: u8) -> Option<Scope> {
        (1..=4).contains(&q).then_some(Scope::Quarter(q))
    }

    pub fn is_quarter(self) -> bool {
        matches!(self, Scope::Quarter(_))
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Game => f.write_str("game"),
            Scope::Quarter(q) => write!(f, "q{q}"),
        }
    }
}

/// Identifies an observation within a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObservationKey {
    pub subject: String,
    /// ISO-8601 day, `YYYY-MM-DD`.
    pub date: String,
    pub opponent: String,
    pub scope: Scope,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub key: ObservationKey,
    pub shots: ShotString,
    /// Chronological position within the subject's season, from 0.
    pub sequence_index: usize,
}

/// Hit rate of `observations[index]`'s subject over all of its games dated
/// strictly before that observation.
///
/// `observations` is one subject's list sorted by `sequence_index`. Quarters of
/// the same game as the tested one are excluded. Absent when there is no
/// earlier game.
pub fn season_pct_to_date(observations: &[Observation], index: usize) -> Option<Ratio<u64>> {
    let target = observations.get(index)?;
    let (hits, shots) = observations[..index]
        .iter()
        .filter(|o| o.key.date < target.key.date)
        .fold((0u64, 0u64), |(h, n), o| (h + o.shots.hits() as u64, n + o.shots.len() as u64));
    (shots > 0).then(|| Ratio::new(hits, shots))
}

/// Why an observation could not be tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UntestableReason {
    /// The observed statistic is undefined on this string.
    UndefinedStatistic,
    /// Season-to-date null requested for a subject's first game.
    NoSeasonHistory,
}

impl UntestableReason {
    pub fn describe(self) -> &'static str {
        match self {
            UntestableReason::UndefinedStatistic => {
                "statistic is undefined: a required conditioning run never has a following shot"
            }
            UntestableReason::NoSeasonHistory => "no earlier games to estimate a season-to-date hit rate",
        }
    }
}

impl fmt::Display for UntestableReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("untestable observation: {0}")]
    Untestable(UntestableReason),
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// The testable part of an observation's result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestedObservation {
    pub observed: Fraction,
    pub p_value: PValue,
    pub significant: bool,
}

/// Tests one observation under `cfg`.
///
/// `season_pct` is the subject's season-to-date hit rate, needed only for the
/// season Bernoulli null.
pub fn analyze_observation(
    shots: &ShotString,
    cfg: &TestConfig,
    season_pct: Option<f64>,
) -> Result<TestedObservation, AnalysisError> {
    cfg.validate()?;
    if shots.is_empty() {
        return Err(Error::EmptyString.into());
    }
    let observed = cfg.statistic.evaluate(shots, cfg.depth);
    let StatValue::Defined(value) = observed else {
        return Err(AnalysisError::Untestable(UntestableReason::UndefinedStatistic));
    };
    let null = match cfg.null_model {
        NullModel::Permutation => permutation_null(shots, cfg)?,
        NullModel::BernoulliGame => {
            let p = shots.hits() as f64 / shots.len() as f64;
            bernoulli_null(shots.len(), p, cfg)?
        }
        NullModel::BernoulliSeason => {
            let p = season_pct.ok_or(AnalysisError::Untestable(UntestableReason::NoSeasonHistory))?;
            bernoulli_null(shots.len(), p, cfg)?
        }
    };
    let p_value = p_value(observed, &null).expect("observed is defined and null is nonempty");
    Ok(TestedObservation {
        observed: value,
        significant: p_value.is_significant(cfg.alpha),
        p_value,
    })
}

/// The configurations every observation of a batch is tested under.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigGrid {
    pub statistics: Vec<Statistic>,
    pub depths: Vec<Depth>,
    pub null_models: Vec<NullModel>,
    pub resamples: u64,
    pub master_seed: u64,
    pub alpha: f64,
}

impl Default for ConfigGrid {
    fn default() -> Self {
        Self {
            statistics: alloc::vec![Statistic::Tk],
            depths: alloc::vec![Depth::new(2).expect("nonzero")],
            null_models: alloc::vec![NullModel::Permutation],
            resamples: DEFAULT_RESAMPLES,
            master_seed: DEFAULT_SEED,
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl ConfigGrid {
    /// Grid configurations in statistic, depth, null-model order. Seeds are
    /// left at the master seed; [`ConfigGrid::seed_for`] specializes them.
    pub fn configs(&self) -> impl Iterator<Item = TestConfig> + '_ {
        self.statistics.iter().flat_map(move |&statistic| {
            self.depths.iter().flat_map(move |&depth| {
                self.null_models.iter().map(move |&null_model| TestConfig {
                    depth,
                    statistic,
                    null_model,
                    resamples: self.resamples,
                    seed: self.master_seed,
                    alpha: self.alpha,
                })
            })
        })
    }

    pub fn len(&self) -> usize {
        self.statistics.len() * self.depths.len() * self.null_models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Seed for testing observation `key` under `cfg`.
    pub fn seed_for(&self, key: &ObservationKey, cfg: &TestConfig) -> u64 {
        let scope = scope_bytes(key.scope);
        derive_seed(
            self.master_seed,
            &[
                key.subject.as_bytes(),
                key.date.as_bytes(),
                key.opponent.as_bytes(),
                &scope,
                &(cfg.depth.get() as u64).to_le_bytes(),
                cfg.statistic.name().as_bytes(),
                cfg.null_model.name().as_bytes(),
            ],
        )
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

fn scope_bytes(scope: Scope) -> [u8; 2] {
    match scope {
        Scope::Game => *b"g0",
        Scope::Quarter(q) => [b'q', q],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Tested { p_value: PValue, significant: bool },
    Untestable(UntestableReason),
}

/// One observation tested under one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationResult {
    pub key: ObservationKey,
    pub shots: usize,
    pub hits: usize,
    pub config: TestConfig,
    pub observed: StatValue,
    pub verdict: Verdict,
}

impl ObservationResult {
    pub fn p_value(&self) -> Option<&PValue> {
        match &self.verdict {
            Verdict::Tested { p_value, .. } => Some(p_value),
            Verdict::Untestable(_) => None,
        }
    }

    pub fn is_significant(&self) -> bool {
        matches!(self.verdict, Verdict::Tested { significant: true, .. })
    }
}

/// One (observation, configuration) work item of a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchUnit {
    pub observation: usize,
    pub config: TestConfig,
    pub season_pct: Option<f64>,
}

/// Work items of a batch in output order: observations in dataset order, then
/// grid configurations.
pub fn batch_plan(dataset: &[Observation], grid: &ConfigGrid) -> Result<Vec<BatchUnit>, Error> {
    grid.validate()?;
    let season = season_rates(dataset);
    let mut units = Vec::with_capacity(dataset.len() * grid.len());
    for (i, obs) in dataset.iter().enumerate() {
        for mut config in grid.configs() {
            config.seed = grid.seed_for(&obs.key, &config);
            units.push(BatchUnit {
                observation: i,
                config,
                season_pct: season[i],
            });
        }
    }
    Ok(units)
}

/// Season-to-date rate for every observation, indexed like `dataset`.
fn season_rates(dataset: &[Observation]) -> Vec<Option<f64>> {
    let mut by_subject: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, obs) in dataset.iter().enumerate() {
        by_subject.entry(obs.key.subject.as_str()).or_default().push(i);
    }
    let mut rates = alloc::vec![None; dataset.len()];
    for indices in by_subject.values_mut() {
        indices.sort_by_key(|&i| dataset[i].sequence_index);
        let ordered: Vec<Observation> = indices.iter().map(|&i| dataset[i].clone()).collect();
        for (pos, &i) in indices.iter().enumerate() {
            rates[i] = season_pct_to_date(&ordered, pos).map(|r| *r.numer() as f64 / *r.denom() as f64);
        }
    }
    rates
}

pub fn run_unit(dataset: &[Observation], unit: &BatchUnit) -> Result<ObservationResult, Error> {
    let obs = &dataset[unit.observation];
    let observed = unit.config.statistic.evaluate(&obs.shots, unit.config.depth);
    let verdict = match analyze_observation(&obs.shots, &unit.config, unit.season_pct) {
        Ok(t) => Verdict::Tested {
            p_value: t.p_value,
            significant: t.significant,
        },
        Err(AnalysisError::Untestable(reason)) => Verdict::Untestable(reason),
        Err(AnalysisError::Invalid(e)) => return Err(e),
    };
    Ok(ObservationResult {
        key: obs.key.clone(),
        shots: obs.shots.len(),
        hits: obs.shots.hits(),
        config: unit.config,
        observed,
        verdict,
    })
}

/// Tests every observation under every grid configuration, sequentially.
///
/// Untestable observations appear in the output with their reason; only
/// invalid input (empty strings, bad grid) aborts.
pub fn batch_analyze(dataset: &[Observation], grid: &ConfigGrid) -> Result<Vec<ObservationResult>, Error> {
    batch_plan(dataset, grid)?
        .iter()
        .map(|unit| run_unit(dataset, unit))
        .collect()
}
