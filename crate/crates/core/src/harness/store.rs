use std::fs;
use std::path::{Path, PathBuf};

use super::session::MatchOutcome;
use super::HarnessError;
use crate::analytics::MatchRecord;
use crate::tutor::trace_to_jsonl;

/// Directory of match records: `<id>.json`, `<id>.events.jsonl` and, for tutor
/// matches, `<id>.trace.jsonl`.
#[derive(Debug, Clone)]
pub struct MatchStore {
    dir: PathBuf,
}

impl MatchStore {
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes the record and its logs; returns the record path.
    pub fn save(&self, outcome: &MatchOutcome) -> Result<PathBuf, HarnessError> {
        let rec = &outcome.record;
        write(&self.dir.join(&rec.event_log), outcome.log.as_bytes())?;
        if !outcome.trace.is_empty() {
            write(&self.dir.join(format!("{}.trace.jsonl", rec.match_id)), trace_to_jsonl(&outcome.trace).as_bytes())?;
        }
        let path = self.dir.join(format!("{}.json", rec.match_id));
        let json = serde_json::to_string_pretty(rec).expect("records serialize") + "\n";
        write(&path, json.as_bytes())?;
        Ok(path)
    }

    /// Every record in the directory, ordered by match id.
    pub fn load_all(&self) -> Result<Vec<MatchRecord>, HarnessError> {
        let entries = fs::read_dir(&self.dir).map_err(|e| HarnessError::io(&self.dir, e))?;
        let mut records = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| HarnessError::io(&self.dir, e))?.path();
            if path.extension().is_some_and(|x| x == "json") && path.to_string_lossy().ends_with(".json") {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                if name.starts_with("report") {
                    continue;
                }
                records.push(load_record(&path)?);
            }
        }
        records.sort_by(|a, b| a.match_id.cmp(&b.match_id));
        Ok(records)
    }

    pub fn event_log_path(&self, record: &MatchRecord) -> PathBuf {
        self.dir.join(&record.event_log)
    }
}

pub fn load_record(path: &Path) -> Result<MatchRecord, HarnessError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Json {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

pub fn read_text(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn write(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}
