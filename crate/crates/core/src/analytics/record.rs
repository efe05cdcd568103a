use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::kda::ScoreLine;
use crate::arena::{Team, UnitId};

/// Which tutor systems were active in a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Baseline,
    SupportOnly,
    SupportPlusTips,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Baseline, Condition::SupportOnly, Condition::SupportPlusTips];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Baseline => "baseline",
            Condition::SupportOnly => "support_only",
            Condition::SupportPlusTips => "support_plus_tips",
        }
    }

    pub fn has_tutor(self) -> bool {
        self != Condition::Baseline
    }

    pub fn has_tips(self) -> bool {
        self == Condition::SupportPlusTips
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown condition {s:?}"))
    }
}

/// Position of a match relative to the one played with the tutor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Before,
    WithTutor,
    After,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Before, Phase::WithTutor, Phase::After];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Before => "before",
            Phase::WithTutor => "with_tutor",
            Phase::After => "after",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Phase::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown phase {s:?}"))
    }
}

/// Persisted summary of one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchRecord {
    pub match_id: String,
    pub seed: u64,
    pub config_hash: String,
    /// Systems active in this match.
    pub condition: Condition,
    /// Experimental group when the match belongs to a before/after series.
    #[serde(default)]
    pub group: Option<Condition>,
    #[serde(default)]
    pub phase: Option<Phase>,
    pub duration_ticks: u64,
    pub winner: Option<Team>,
    pub novice: UnitId,
    pub tutor: Option<UnitId>,
    pub scorelines: Vec<ScoreLine>,
    /// Path of the JSONL event log, relative to the record file.
    pub event_log: String,
    /// Hex SHA-256 of the event log bytes.
    pub log_checksum: String,
}

impl MatchRecord {
    pub fn scoreline(&self, player: UnitId) -> Option<&ScoreLine> {
        self.scorelines.iter().find(|s| s.player == player)
    }

    /// Label used when grouping records into series.
    pub fn series_condition(&self) -> Condition {
        self.group.unwrap_or(self.condition)
    }
}
