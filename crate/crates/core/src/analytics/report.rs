use serde::{Deserialize, Serialize};

use super::record::{Condition, MatchRecord, Phase};
use super::AnalyticsError;
use crate::arena::UnitId;

/// KDA statistics of one player over one series of matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub player: UnitId,
    pub condition: Condition,
    pub phase: Option<Phase>,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single match.
    pub stddev: f64,
    pub kdas: Vec<f64>,
}

impl SeriesReport {
    /// Builds a report from per-match KDA values. The statistics are computed over
    /// the sorted values so they do not depend on series order.
    pub fn from_kdas(player: UnitId, condition: Condition, phase: Option<Phase>, kdas: Vec<f64>) -> Self {
        let (mean, stddev) = mean_stddev(&kdas);
        Self {
            player,
            condition,
            phase,
            n: kdas.len(),
            mean,
            stddev,
            kdas,
        }
    }
}

/// Arithmetic mean and sample standard deviation. Empty input gives (0, 0).
pub fn mean_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = sorted.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// KDA mean and sample stddev of `player` across `series`.
pub fn aggregate(series: &[MatchRecord], player: UnitId) -> Result<SeriesReport, AnalyticsError> {
    let first = series.first().ok_or(AnalyticsError::EmptySeries)?;
    let kdas = series
        .iter()
        .map(|r| {
            r.scoreline(player)
                .map(|s| s.kda())
                .ok_or_else(|| AnalyticsError::PlayerMissing {
                    player,
                    match_id: r.match_id.clone(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesReport::from_kdas(player, first.series_condition(), first.phase, kdas))
}

/// One line of the before/after table; `report` is `None` when the phase has no matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub phase: Option<Phase>,
    pub condition: Condition,
    pub report: Option<SeriesReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub player: UnitId,
    pub rows: Vec<PhaseRow>,
}

/// Highlights of one group's before/after series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub condition: Condition,
    /// KDA of the match played with the tutor.
    pub tutor_match_kda: Option<f64>,
    /// After-phase mean above before-phase mean; `None` when either phase is absent.
    pub improved: Option<bool>,
}

impl ExperimentReport {
    pub fn row(&self, condition: Condition, phase: Option<Phase>) -> Option<&PhaseRow> {
        self.rows.iter().find(|r| r.condition == condition && r.phase == phase)
    }

    pub fn summary(&self, condition: Condition) -> GroupSummary {
        let mean = |p| self.row(condition, Some(p)).and_then(|r| r.report.as_ref()).map(|r| r.mean);
        let tutor_match_kda = self
            .row(condition, Some(Phase::WithTutor))
            .and_then(|r| r.report.as_ref())
            .and_then(|r| r.kdas.last().copied());
        let improved = match (mean(Phase::Before), mean(Phase::After)) {
            (Some(b), Some(a)) => Some(b < a),
            _ => None,
        };
        GroupSummary {
            condition,
            tutor_match_kda,
            improved,
        }
    }

    pub fn to_csv(&self) -> String {
        super::csv_io::write_rows(&self.rows)
    }
}

/// Groups phase-labelled records by experimental group and phase. Every group gets a
/// before, with-tutor and after row; phases without matches are marked absent.
/// Records without a phase are ignored.
pub fn experiment_report(records: &[MatchRecord], player: UnitId) -> Result<ExperimentReport, AnalyticsError> {
    let mut groups: Vec<Condition> = records
        .iter()
        .filter(|r| r.phase.is_some())
        .map(|r| r.series_condition())
        .collect();
    groups.sort();
    groups.dedup();
    let mut rows = Vec::new();
    for condition in groups {
        for phase in Phase::ALL {
            let series: Vec<MatchRecord> = records
                .iter()
                .filter(|r| r.phase == Some(phase) && r.series_condition() == condition)
                .cloned()
                .collect();
            let report = if series.is_empty() {
                None
            } else {
                Some(aggregate(&series, player)?)
            };
            rows.push(PhaseRow {
                phase: Some(phase),
                condition,
                report,
            });
        }
    }
    Ok(ExperimentReport { player, rows })
}

/// One report per condition over records without a phase label.
pub fn condition_reports(records: &[MatchRecord], player: UnitId) -> Result<Vec<SeriesReport>, AnalyticsError> {
    let mut out = Vec::new();
    for condition in Condition::ALL {
        let series: Vec<MatchRecord> = records
            .iter()
            .filter(|r| r.phase.is_none() && r.series_condition() == condition)
            .cloned()
            .collect();
        if !series.is_empty() {
            out.push(aggregate(&series, player)?);
        }
    }
    Ok(out)
}
