use super::record::{Condition, Phase};
use super::report::{PhaseRow, SeriesReport};
use super::AnalyticsError;
use crate::arena::UnitId;

pub const CSV_HEADER: [&str; 7] = ["player", "phase", "condition", "n", "mean", "stddev", "kdas"];

const ABSENT: &str = "absent";
const ALL_PHASES: &str = "all";

/// Statistics are printed with six decimals; `kdas` carries the exact per-match
/// values (shortest round-trip form, `;`-separated) so the report can be rebuilt.
pub fn write_rows(rows: &[PhaseRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        let phase = row.phase.map_or(ALL_PHASES, Phase::as_str);
        let record: Vec<String> = match &row.report {
            Some(r) => vec![
                r.player.0.to_string(),
                phase.to_string(),
                row.condition.to_string(),
                r.n.to_string(),
                format!("{:.6}", r.mean),
                format!("{:.6}", r.stddev),
                r.kdas.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
            ],
            None => vec![
                String::new(),
                phase.to_string(),
                row.condition.to_string(),
                "0".into(),
                ABSENT.into(),
                ABSENT.into(),
                String::new(),
            ],
        };
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn write_reports(reports: &[SeriesReport]) -> String {
    let rows: Vec<PhaseRow> = reports
        .iter()
        .map(|r| PhaseRow {
            phase: r.phase,
            condition: r.condition,
            report: Some(r.clone()),
        })
        .collect();
    write_rows(&rows)
}

/// Parses a report CSV back into rows, checking the printed statistics against the
/// per-match values.
pub fn read_rows(text: &str) -> Result<Vec<PhaseRow>, AnalyticsError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let bad = |line: usize, msg: String| AnalyticsError::Csv { line, msg };
    let headers = reader.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(bad(1, format!("unexpected header {headers:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        let field = |k: usize| rec.get(k).unwrap_or_default();
        let phase = match field(1) {
            ALL_PHASES => None,
            p => Some(p.parse::<Phase>().map_err(|e| bad(line, e))?),
        };
        let condition: Condition = field(2).parse().map_err(|e| bad(line, e))?;
        let n: usize = field(3).parse().map_err(|_| bad(line, format!("bad n {:?}", field(3))))?;
        if n == 0 {
            rows.push(PhaseRow { phase, condition, report: None });
            continue;
        }
        let player: u32 = field(0).parse().map_err(|_| bad(line, format!("bad player {:?}", field(0))))?;
        let kdas = field(6)
            .split(';')
            .map(|v| v.parse::<f64>().map_err(|_| bad(line, format!("bad kda {v:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let report = SeriesReport::from_kdas(UnitId(player), condition, phase, kdas);
        if report.n != n || format!("{:.6}", report.mean) != field(4) || format!("{:.6}", report.stddev) != field(5) {
            return Err(bad(line, "printed statistics disagree with per-match values".into()));
        }
        rows.push(PhaseRow {
            phase,
            condition,
            report: Some(report),
        });
    }
    Ok(rows)
}
