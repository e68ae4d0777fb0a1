//! Machine-readable report documents.
//!
//! Every JSON document carries `schema_version` and `kind` and is described
//! by a schema under `schemas/`. Floating-point fields are rounded to six
//! decimal places; statistic values are also given as exact fractions.
//! Field order is fixed by the record structs.

use std::fmt::Write as _;

use hotstreak_core::analysis::{
    DatasetSummary, HistogramReport, ObservationKey, ObservationResult, Scope, SignificanceTable,
    SubjectPValues, UntestableReason, Verdict,
};
use hotstreak_core::resampling::{MeanBias, NullKind, NullModel, PValue, TestConfig};
use hotstreak_core::{Depth, Fraction, StatValue, Statistic};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn fraction_f64(v: Fraction) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report documents serialize");
    s.push('\n');
    s
}

pub fn parse_statistic(s: &str) -> Option<Statistic> {
    match s {
        "tk" => Some(Statistic::Tk),
        "tk-hit" => Some(Statistic::TkHit),
        "tk-miss" => Some(Statistic::TkMiss),
        _ => None,
    }
}

pub fn parse_null_model(s: &str) -> Option<NullModel> {
    match s {
        "perm" => Some(NullModel::Permutation),
        "bern-game" => Some(NullModel::BernoulliGame),
        "bern-season" => Some(NullModel::BernoulliSeason),
        _ => None,
    }
}

fn parse_scope(s: &str) -> Option<Scope> {
    match s {
        "game" => Some(Scope::Game),
        q => q.strip_prefix('q')?.parse().ok().and_then(Scope::quarter),
    }
}

fn reason_code(reason: UntestableReason) -> &'static str {
    match reason {
        UntestableReason::UndefinedStatistic => "undefined_statistic",
        UntestableReason::NoSeasonHistory => "no_season_history",
    }
}

fn parse_reason(s: &str) -> Option<UntestableReason> {
    match s {
        "undefined_statistic" => Some(UntestableReason::UndefinedStatistic),
        "no_season_history" => Some(UntestableReason::NoSeasonHistory),
        _ => None,
    }
}

/// One observation tested under one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub subject: String,
    pub date: String,
    pub opponent: String,
    pub scope: String,
    pub shots: usize,
    pub hits: usize,
    pub statistic: String,
    pub k: usize,
    pub null: String,
    pub resamples: u64,
    pub seed: u64,
    pub alpha: f64,
    /// `tested` or `untestable`.
    pub status: String,
    pub reason: Option<String>,
    /// Exact observed value, e.g. `-7/19`.
    pub t: Option<String>,
    pub t_decimal: Option<f64>,
    pub p: Option<f64>,
    pub exceed_count: Option<u64>,
    pub defined_draws: Option<u64>,
    pub total_draws: Option<u64>,
    pub significant: bool,
}

impl From<&ObservationResult> for ResultRecord {
    fn from(r: &ObservationResult) -> Self {
        let (status, reason, pv) = match &r.verdict {
            Verdict::Tested { p_value, .. } => ("tested", None, Some(*p_value)),
            Verdict::Untestable(reason) => ("untestable", Some(reason_code(*reason).to_string()), None),
        };
        ResultRecord {
            subject: r.key.subject.clone(),
            date: r.key.date.clone(),
            opponent: r.key.opponent.clone(),
            scope: r.key.scope.to_string(),
            shots: r.shots,
            hits: r.hits,
            statistic: r.config.statistic.name().into(),
            k: r.config.depth.get(),
            null: r.config.null_model.name().into(),
            resamples: r.config.resamples,
            seed: r.config.seed,
            alpha: r.config.alpha,
            status: status.into(),
            reason,
            t: r.observed.fraction().map(|v| v.to_string()),
            t_decimal: r.observed.fraction().map(|v| round6(fraction_f64(v))),
            p: pv.map(|p| round6(p.value())),
            exceed_count: pv.map(|p| p.exceed_count),
            defined_draws: pv.map(|p| p.defined_draws),
            total_draws: pv.map(|p| p.total_draws),
            significant: r.is_significant(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("result record for {subject} {date}: bad field `{field}`")]
pub struct RecordError {
    pub subject: String,
    pub date: String,
    pub field: &'static str,
}

impl ResultRecord {
    /// Rebuilds the in-memory result.
    pub fn to_result(&self) -> Result<ObservationResult, RecordError> {
        let bad = |field| RecordError {
            subject: self.subject.clone(),
            date: self.date.clone(),
            field,
        };
        let depth = Depth::new(self.k).map_err(|_| bad("k"))?;
        let config = TestConfig {
            depth,
            statistic: parse_statistic(&self.statistic).ok_or_else(|| bad("statistic"))?,
            null_model: parse_null_model(&self.null).ok_or_else(|| bad("null"))?,
            resamples: self.resamples,
            seed: self.seed,
            alpha: self.alpha,
        };
        let observed = match &self.t {
            None => StatValue::Undefined,
            Some(t) => StatValue::Defined(t.parse::<Fraction>().map_err(|_| bad("t"))?),
        };
        let verdict = match self.status.as_str() {
            "tested" => Verdict::Tested {
                p_value: PValue {
                    exceed_count: self.exceed_count.ok_or_else(|| bad("exceed_count"))?,
                    defined_draws: self.defined_draws.ok_or_else(|| bad("defined_draws"))?,
                    total_draws: self.total_draws.ok_or_else(|| bad("total_draws"))?,
                },
                significant: self.significant,
            },
            "untestable" => Verdict::Untestable(
                self.reason.as_deref().and_then(parse_reason).ok_or_else(|| bad("reason"))?,
            ),
            _ => return Err(bad("status")),
        };
        Ok(ObservationResult {
            key: ObservationKey {
                subject: self.subject.clone(),
                date: self.date.clone(),
                opponent: self.opponent.clone(),
                scope: parse_scope(&self.scope).ok_or_else(|| bad("scope"))?,
            },
            shots: self.shots,
            hits: self.hits,
            config,
            observed,
            verdict,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub schema_version: u32,
    pub kind: String,
    pub results: Vec<ResultRecord>,
}

impl ResultsDocument {
    pub fn new(results: &[ObservationResult]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "results".into(),
            results: results.iter().map(ResultRecord::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub subject: String,
    pub games: usize,
    pub observations: usize,
    pub total_hits: u64,
    pub total_shots: u64,
    pub season_pct: f64,
    pub season_pct_fraction: String,
    pub avg_game_pct: f64,
    pub stdev_game_pct: f64,
    pub avg_shots: f64,
    pub stdev_shots: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub subject: String,
    pub statistic: String,
    pub null: String,
    pub k: usize,
    pub significant: usize,
    pub tested: usize,
    pub untestable: usize,
    pub observations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRecord {
    pub alpha: f64,
    pub rows: Vec<SignificanceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub schema_version: u32,
    pub kind: String,
    pub subjects: Vec<SubjectRecord>,
    pub significance: SignificanceRecord,
}

pub fn subject_records(summary: &DatasetSummary) -> Vec<SubjectRecord> {
    summary
        .subjects
        .iter()
        .map(|s| SubjectRecord {
            subject: s.subject.clone(),
            games: s.games,
            observations: s.observations,
            total_hits: s.total_hits,
            total_shots: s.total_shots,
            season_pct: round6(*s.season_pct.numer() as f64 / *s.season_pct.denom() as f64),
            season_pct_fraction: s.season_pct.to_string(),
            avg_game_pct: round6(s.avg_game_pct),
            stdev_game_pct: round6(s.stdev_game_pct),
            avg_shots: round6(s.avg_shots),
            stdev_shots: round6(s.stdev_shots),
        })
        .collect()
}

pub fn significance_rows(table: &SignificanceTable) -> Vec<SignificanceRow> {
    table
        .cells
        .iter()
        .map(|((subject, statistic, null, depth), cell)| SignificanceRow {
            subject: subject.clone(),
            statistic: statistic.name().into(),
            null: null.name().into(),
            k: depth.get(),
            significant: cell.significant,
            tested: cell.tested,
            untestable: cell.untestable,
            observations: cell.observations(),
        })
        .collect()
}

impl SummaryDocument {
    pub fn new(summary: &DatasetSummary, table: &SignificanceTable) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "summary".into(),
            subjects: subject_records(summary),
            significance: SignificanceRecord {
                alpha: table.alpha,
                rows: significance_rows(table),
            },
        }
    }
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    write(&mut w).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn percent(x: f64) -> String {
    format!("{:.1}%", x * 100.0)
}

type Cell = Box<dyn Fn(&hotstreak_core::analysis::SubjectSummary) -> String>;

/// Season summary laid out with one row per statistic and one column per
/// subject.
pub fn summary_csv(summary: &DatasetSummary) -> String {
    let subjects = &summary.subjects;
    let rows: [(&str, Cell); 7] = [
        ("Games", Box::new(|s| s.games.to_string())),
        ("Observations", Box::new(|s| s.observations.to_string())),
        (
            "Season Percentage",
            Box::new(|s| percent(*s.season_pct.numer() as f64 / *s.season_pct.denom() as f64)),
        ),
        ("Average Game Percentage", Box::new(|s| percent(s.avg_game_pct))),
        ("StDev Game Percentage", Box::new(|s| percent(s.stdev_game_pct))),
        ("Average Number of Shots", Box::new(|s| format!("{:.1}", s.avg_shots))),
        ("StDev Number of Shots", Box::new(|s| format!("{:.1}", s.stdev_shots))),
    ];
    csv_string(|w| {
        let mut header = vec![String::new()];
        header.extend(subjects.iter().map(|s| s.subject.clone()));
        w.write_record(&header)?;
        for (label, cell) in &rows {
            let mut record = vec![label.to_string()];
            record.extend(subjects.iter().map(&cell));
            w.write_record(&record)?;
        }
        Ok(())
    })
}

pub fn significance_csv(table: &SignificanceTable) -> String {
    csv_string(|w| {
        for row in significance_rows(table) {
            w.serialize(row)?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRecord {
    pub statistic: String,
    pub k: usize,
    pub null_kind: String,
    pub bins: usize,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub undefined_count: u64,
    pub total_draws: u64,
    pub observed: Option<f64>,
    pub observed_fraction: Option<String>,
    pub alpha: f64,
    pub critical_threshold: Option<f64>,
    pub critical_threshold_fraction: Option<String>,
    pub critical_mass: u64,
    pub modal_value: Option<f64>,
    pub modal_value_fraction: Option<String>,
}

impl HistogramRecord {
    pub fn new(statistic: Statistic, depth: Depth, h: &HistogramReport) -> Self {
        Self {
            statistic: statistic.name().into(),
            k: depth.get(),
            null_kind: match h.kind {
                NullKind::MonteCarlo => "monte_carlo",
                NullKind::Exact => "exact",
            }
            .into(),
            bins: h.counts.len(),
            edges: h.edges.iter().map(|&e| round6(e)).collect(),
            counts: h.counts.clone(),
            undefined_count: h.undefined_count,
            total_draws: h.total_draws,
            observed: h.observed.to_f64().map(round6),
            observed_fraction: h.observed.fraction().map(|v| v.to_string()),
            alpha: h.alpha,
            critical_threshold: h.critical_threshold.map(|v| round6(fraction_f64(v))),
            critical_threshold_fraction: h.critical_threshold.map(|v| v.to_string()),
            critical_mass: h.critical_mass,
            modal_value: h.modal_value.map(|v| round6(fraction_f64(v))),
            modal_value_fraction: h.modal_value.map(|v| v.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramDocument {
    pub schema_version: u32,
    pub kind: String,
    pub shots: String,
    pub histograms: Vec<HistogramRecord>,
}

impl HistogramDocument {
    pub fn new(shots: String, histograms: Vec<HistogramRecord>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "histogram".into(),
            shots,
            histograms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueSubject {
    pub subject: String,
    pub tested: usize,
    pub untestable: usize,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    /// `[p, cumulative fraction]` pairs.
    pub ecdf: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueDocument {
    pub schema_version: u32,
    pub kind: String,
    pub statistic: String,
    pub k: usize,
    pub null: String,
    pub subjects: Vec<PValueSubject>,
}

impl PValueDocument {
    pub fn new(statistic: Statistic, depth: Depth, null: NullModel, groups: &[SubjectPValues]) -> Self {
        let subjects = groups
            .iter()
            .map(|g| {
                let s = g.summary;
                PValueSubject {
                    subject: g.subject.clone(),
                    tested: g.p_values.len(),
                    untestable: g.untestable,
                    min: s.map(|s| round6(s.min)),
                    q1: s.map(|s| round6(s.q1)),
                    median: s.map(|s| round6(s.median)),
                    q3: s.map(|s| round6(s.q3)),
                    max: s.map(|s| round6(s.max)),
                    ecdf: g.ecdf.iter().map(|&(p, c)| [round6(p), round6(c)]).collect(),
                }
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "pvalue_distribution".into(),
            statistic: statistic.name().into(),
            k: depth.get(),
            null: null.name().into(),
            subjects,
        }
    }
}

/// One cell of a bias table. `mean` is `None` when no arrangement gives a
/// defined statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasCell {
    pub length: usize,
    pub hits: usize,
    pub depth: Depth,
    pub statistic: Statistic,
    pub mean: Option<MeanBias>,
}

pub fn bias_csv(cells: &[BiasCell]) -> String {
    let mut out = String::from("L,h,k,statistic,mean_bias,mean_bias_fraction,defined_arrangements,arrangements\n");
    for c in cells {
        let (mean, frac, defined, total) = match &c.mean {
            Some(m) => (
                format!("{:.6}", m.to_f64()),
                m.mean.to_string(),
                m.defined_arrangements.to_string(),
                m.arrangements.to_string(),
            ),
            None => ("UNDEFINED".into(), "UNDEFINED".into(), "0".into(), String::new()),
        };
        let total = if total.is_empty() {
            hotstreak_core::resampling::binomial(c.length, c.hits).map_or_else(String::new, |n| n.to_string())
        } else {
            total
        };
        writeln!(
            out,
            "{},{},{},{},{mean},{frac},{defined},{total}",
            c.length, c.hits, c.depth, c.statistic
        )
        .expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use hotstreak_core::analysis::{
        batch_analyze, significance_counts, summarize_dataset, ConfigGrid, Observation,
    };

    fn dataset() -> Vec<Observation> {
        crate::shotlog::parse_shot_log(
            "subject,date,opponent,scope,shots\n\
             Thompson,2016-12-05,LAC,game,11011110010111111001110111101110111101010101\n\
             Thompson,2016-12-23,DET,game,1110100110000011\n\
             Thompson,2016-12-25,CLE,game,1111\n",
            crate::shotlog::Validation::Strict,
        )
        .unwrap()
        .observations
    }

    #[test]
    fn result_record_fields() {
        let grid = ConfigGrid {
            resamples: 10_000,
            ..ConfigGrid::default()
        };
        let results = batch_analyze(&dataset(), &grid).unwrap();
        let doc = ResultsDocument::new(&results);
        let r = &doc.results[0];
        assert_eq!(r.t.as_deref(), Some("-7/19"));
        assert_eq!(r.t_decimal, Some(-0.368421));
        assert!((r.p.unwrap() - 0.84).abs() < 0.03);
        assert_eq!(doc.results[2].status, "untestable");
        assert_eq!(doc.results[2].reason.as_deref(), Some("undefined_statistic"));
        let json = to_json(&doc);
        assert!(json.contains("\"t\": \"-7/19\""));
        assert!(json.ends_with('\n'));
    }

    #[test]
    fn records_rebuild_results() {
        let grid = ConfigGrid {
            resamples: 200,
            ..ConfigGrid::default()
        };
        let results = batch_analyze(&dataset(), &grid).unwrap();
        for r in &results {
            assert_eq!(&ResultRecord::from(r).to_result().unwrap(), r);
        }
    }

    #[test]
    fn empty_results_document() {
        let json = to_json(&ResultsDocument::new(&[]));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["results"], serde_json::json!([]));
    }

    #[test]
    fn significance_csv_matches_json() {
        let grid = ConfigGrid {
            resamples: 200,
            depths: vec![Depth::new(1).unwrap(), Depth::new(2).unwrap()],
            ..ConfigGrid::default()
        };
        let data = dataset();
        let results = batch_analyze(&data, &grid).unwrap();
        let table = significance_counts(&results, 0.05);
        let doc = SummaryDocument::new(&summarize_dataset(&data), &table);
        let csv = significance_csv(&table);
        let from_csv: Vec<SignificanceRow> = csv::Reader::from_reader(csv.as_bytes())
            .deserialize()
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(from_csv, doc.significance.rows);
    }

    #[test]
    fn summary_csv_mirrors_table_rows() {
        let csv = summary_csv(&summarize_dataset(&dataset()));
        let labels: Vec<_> = csv.lines().map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(
            labels,
            [
                "",
                "Games",
                "Observations",
                "Season Percentage",
                "Average Game Percentage",
                "StDev Game Percentage",
                "Average Number of Shots",
                "StDev Number of Shots"
            ]
        );
        assert!(csv.starts_with(",Thompson\n"));
    }

    #[test]
    fn bias_rows() {
        let d1 = Depth::new(1).unwrap();
        let cells = [
            BiasCell {
                length: 3,
                hits: 2,
                depth: d1,
                statistic: Statistic::Tk,
                mean: hotstreak_core::resampling::null_mean_bias(3, 2, d1, Statistic::Tk).unwrap(),
            },
            BiasCell { length: 2, hits: 1, depth: d1, statistic: Statistic::Tk, mean: None },
        ];
        assert_eq!(
            bias_csv(&cells),
            "L,h,k,statistic,mean_bias,mean_bias_fraction,defined_arrangements,arrangements\n\
             3,2,1,tk,-0.500000,-1/2,2,3\n\
             2,1,1,tk,UNDEFINED,UNDEFINED,0,2\n"
        );
    }
}
