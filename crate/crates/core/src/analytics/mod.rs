//! KDA factor, per-series aggregation and before/after experiment reports.

mod csv_io;
mod kda;
mod record;
mod report;

pub use csv_io::{read_rows, write_reports, write_rows, CSV_HEADER};
pub use kda::{kda_factor, scorelines_from_events, ScoreLine};
pub use record::{Condition, MatchRecord, Phase};
pub use report::{
    aggregate, condition_reports, experiment_report, mean_stddev, ExperimentReport, GroupSummary, PhaseRow,
    SeriesReport,
};

use crate::arena::UnitId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("KDA inputs must be nonnegative (K={kills}, D={deaths}, A={assists})")]
    NegativeInput { kills: i64, deaths: i64, assists: i64 },
    #[error("cannot aggregate an empty series")]
    EmptySeries,
    #[error("player {player} missing from match {match_id}")]
    PlayerMissing { player: UnitId, match_id: String },
    #[error("report csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
}
