//! The `shots.csv` ingestion format.
//!
//! ```text
//! subject,date,opponent,scope,shots
//! Thompson,2016-12-23,DET,game,1110100110000011
//! ```
//!
//! `scope` is `game` or `q1`..`q4`. A subject is either game-scoped (a player)
//! or quarter-scoped (a team), never both. `(subject, date, scope)` must be
//! unique.

use std::collections::{HashMap, HashSet};
use std::fmt;

use chrono::NaiveDate;
use hotstreak_core::analysis::{Observation, ObservationKey, Scope};
use hotstreak_core::ShotString;
use thiserror::Error;

pub const HEADER: [&str; 5] = ["subject", "date", "opponent", "scope", "shots"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    /// Any bad row fails the whole file.
    #[default]
    Strict,
    /// Bad rows are skipped and reported.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowProblem {
    FieldCount(usize),
    EmptySubject,
    EmptyOpponent,
    BadDate(String),
    BadScope(String),
    EmptyShots,
    BadShot { position: usize, found: char },
    Duplicate,
    MixedScope,
    Csv(String),
}

impl fmt::Display for RowProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowProblem::FieldCount(n) => write!(f, "expected 5 fields, found {n}"),
            RowProblem::EmptySubject => f.write_str("empty subject"),
            RowProblem::EmptyOpponent => f.write_str("empty opponent"),
            RowProblem::BadDate(d) => write!(f, "malformed date {d:?}, expected YYYY-MM-DD"),
            RowProblem::BadScope(s) => write!(f, "unknown scope {s:?}, expected game or q1..q4"),
            RowProblem::EmptyShots => f.write_str("empty shot string"),
            RowProblem::BadShot { position, found } => {
                write!(f, "invalid shot character {found:?} at position {position}")
            }
            RowProblem::Duplicate => f.write_str("duplicate (subject, date, scope)"),
            RowProblem::MixedScope => f.write_str("subject mixes game and quarter scopes"),
            RowProblem::Csv(e) => write!(f, "unreadable row: {e}"),
        }
    }
}

/// A rejected row. `line` is the 1-based line number in the file, the header
/// being line 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {problem}")]
pub struct RowError {
    pub line: usize,
    pub problem: RowProblem,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShotLogError {
    #[error("missing or malformed header, expected `{}`", HEADER.join(","))]
    Header,
    #[error("{} invalid row(s); first: {}", .0.len(), .0[0])]
    Rows(Vec<RowError>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShotLog {
    /// Sorted by subject, then date, then scope (`q1 < ... < q4 < game`).
    pub observations: Vec<Observation>,
    /// Rows dropped in lenient mode.
    pub skipped: Vec<RowError>,
}

fn parse_scope(s: &str) -> Option<Scope> {
    match s {
        "game" => Some(Scope::Game),
        "q1" => Scope::quarter(1),
        "q2" => Scope::quarter(2),
        "q3" => Scope::quarter(3),
        "q4" => Scope::quarter(4),
        _ => None,
    }
}

fn parse_row(record: &csv::StringRecord) -> Result<(ObservationKey, ShotString), RowProblem> {
    if record.len() != HEADER.len() {
        return Err(RowProblem::FieldCount(record.len()));
    }
    let subject = &record[0];
    if subject.is_empty() {
        return Err(RowProblem::EmptySubject);
    }
    let date = &record[1];
    match NaiveDate::parse_from_str(date, "%Y-%m-%d") {
        Ok(d) if d.format("%Y-%m-%d").to_string() == date => {}
        _ => return Err(RowProblem::BadDate(date.into())),
    }
    let opponent = &record[2];
    if opponent.is_empty() {
        return Err(RowProblem::EmptyOpponent);
    }
    let scope = parse_scope(&record[3]).ok_or_else(|| RowProblem::BadScope(record[3].into()))?;
    let shots_text = &record[4];
    if shots_text.is_empty() {
        return Err(RowProblem::EmptyShots);
    }
    let shots: ShotString = shots_text
        .parse()
        .map_err(|e: hotstreak_core::ParseShotsError| RowProblem::BadShot {
            position: e.position,
            found: e.found,
        })?;
    Ok((
        ObservationKey {
            subject: subject.into(),
            date: date.into(),
            opponent: opponent.into(),
            scope,
        },
        shots,
    ))
}

/// Parses and validates a shot log. A header-only file yields an empty log.
pub fn parse_shot_log(text: &str, validation: Validation) -> Result<ShotLog, ShotLogError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    match records.next() {
        Some(Ok(h)) if h.iter().eq(HEADER) => {}
        _ => return Err(ShotLogError::Header),
    }

    let mut errors = Vec::new();
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    let mut subject_scope: HashMap<String, bool> = HashMap::new();
    for record in records {
        let (line, parsed) = match record {
            Ok(r) => (
                r.position().map_or(0, |p| p.line() as usize),
                parse_row(&r),
            ),
            Err(e) => (
                e.position().map_or(0, |p| p.line() as usize),
                Err(RowProblem::Csv(e.to_string())),
            ),
        };
        let checked = parsed.and_then(|(key, shots)| {
            if !seen.insert((key.subject.clone(), key.date.clone(), key.scope)) {
                return Err(RowProblem::Duplicate);
            }
            let quarter = key.scope.is_quarter();
            if *subject_scope.entry(key.subject.clone()).or_insert(quarter) != quarter {
                return Err(RowProblem::MixedScope);
            }
            Ok((key, shots))
        });
        match checked {
            Ok(row) => rows.push(row),
            Err(problem) => errors.push(RowError { line, problem }),
        }
    }
    if validation == Validation::Strict && !errors.is_empty() {
        return Err(ShotLogError::Rows(errors));
    }

    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut observations = Vec::with_capacity(rows.len());
    let mut next_index: HashMap<String, usize> = HashMap::new();
    for (key, shots) in rows {
        let idx = next_index.entry(key.subject.clone()).or_insert(0);
        observations.push(Observation {
            key,
            shots,
            sequence_index: *idx,
        });
        *idx += 1;
    }
    Ok(ShotLog {
        observations,
        skipped: errors,
    })
}

/// Writes observations back out in the ingestion format, LF line endings.
pub fn write_shot_log(observations: &[Observation]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(HEADER).expect("in-memory write");
    for o in observations {
        writer
            .write_record([
                o.key.subject.as_str(),
                o.key.date.as_str(),
                o.key.opponent.as_str(),
                &o.key.scope.to_string(),
                &o.shots.to_string(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}
