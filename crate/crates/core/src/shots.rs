use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;
use core::str::FromStr;

use thiserror::Error;

/// Result of a single attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Miss,
    Hit,
}

impl Outcome {
    pub fn is_hit(self) -> bool {
        self == Outcome::Hit
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Hit => '1',
            Outcome::Miss => '0',
        }
    }
}

/// An ordered record of hits (`1`) and misses (`0`) for one observation window.
///
/// Stored as one `bool` per shot, `true` meaning a hit. Dereferences to
/// `[bool]` so the statistic functions accept it directly.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ShotString {
    shots: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid character {found:?} at position {position}; expected '0' or '1'")]
pub struct ParseShotsError {
    pub position: usize,
    pub found: char,
}

impl ShotString {
    pub fn new(shots: Vec<bool>) -> Self {
        Self { shots }
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    pub fn hits(&self) -> usize {
        self.shots.iter().filter(|&&s| s).count()
    }

    pub fn misses(&self) -> usize {
        self.len() - self.hits()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = Outcome> + '_ {
        self.shots
            .iter()
            .map(|&s| if s { Outcome::Hit } else { Outcome::Miss })
    }

    /// Swaps every hit for a miss and vice versa.
    pub fn complement(&self) -> Self {
        Self::new(self.shots.iter().map(|&s| !s).collect())
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.shots
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.shots
    }
}

impl Deref for ShotString {
    type Target = [bool];

    fn deref(&self) -> &[bool] {
        &self.shots
    }
}

impl From<Vec<bool>> for ShotString {
    fn from(shots: Vec<bool>) -> Self {
        Self::new(shots)
    }
}

impl FromStr for ShotString {
    type Err = ParseShotsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(position, c)| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                found => Err(ParseShotsError { position, found }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }
}

impl fmt::Display for ShotString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in self.outcomes() {
            write!(f, "{}", o.symbol())?;
        }
        Ok(())
    }
}
