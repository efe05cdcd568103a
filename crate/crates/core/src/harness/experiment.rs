use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::policy::NoviceParams;
use super::session::{run_match, MatchOutcome, MatchSetup};
use super::store::{read_text, write, MatchStore};
use super::HarnessError;
use crate::analytics::{
    condition_reports, experiment_report, write_reports, Condition, ExperimentReport, MatchRecord, Phase, SeriesReport,
};
use crate::arena::{ArenaConfig, MapSpec, UnitId};
use crate::bt::BtNode;
use crate::tips::TipTable;
use crate::tutor::{default_tree, TutorConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// `matches` games per condition on the same seed block.
    #[default]
    Conditions,
    /// Per tutor condition: `matches` baseline games, one tutor game, then
    /// `matches` baseline games with the after-tutoring novice preset.
    BeforeAfter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub conditions: Vec<Condition>,
    pub matches: u32,
    #[serde(default)]
    pub novice: NoviceParams,
    /// Novice preset for the after phase; derived from `novice` when omitted.
    #[serde(default)]
    pub novice_after: Option<NoviceParams>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub protocol: Protocol,
    #[serde(default)]
    pub tutor: Option<TutorConfig>,
    /// Arena config file; the built-in arena when omitted.
    #[serde(default)]
    pub config: Option<PathBuf>,
    /// Map file replacing the config's map.
    #[serde(default)]
    pub map: Option<PathBuf>,
    #[serde(default)]
    pub tree: Option<PathBuf>,
    #[serde(default)]
    pub table: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(conditions: Vec<Condition>, matches: u32) -> Self {
        Self {
            conditions,
            matches,
            novice: NoviceParams::default(),
            novice_after: None,
            base_seed: 0,
            protocol: Protocol::Conditions,
            tutor: None,
            config: None,
            map: None,
            tree: None,
            table: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| HarnessError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.matches == 0 {
            return Err(HarnessError::Spec("matches must be at least 1".into()));
        }
        if self.conditions.is_empty() {
            return Err(HarnessError::Spec("conditions must not be empty".into()));
        }
        let mut seen = self.conditions.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.conditions.len() {
            return Err(HarnessError::Spec("conditions must not repeat".into()));
        }
        if self.protocol == Protocol::BeforeAfter && !self.conditions.iter().any(|c| c.has_tutor()) {
            return Err(HarnessError::Spec("before_after needs at least one tutor condition".into()));
        }
        self.novice.validate()?;
        if let Some(n) = &self.novice_after {
            n.validate()?;
        }
        if let Some(t) = &self.tutor {
            t.validate()?;
        }
        Ok(())
    }

    pub fn after_params(&self) -> NoviceParams {
        self.novice_after.unwrap_or_else(|| self.novice.after_tutoring())
    }

    /// Loads the referenced files, resolving relative paths against `base`.
    pub fn load_inputs(&self, base: &Path) -> Result<ExperimentInputs, HarnessError> {
        let resolve = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
        let mut arena = match &self.config {
            Some(p) => ArenaConfig::from_json(&read_text(&resolve(p))?)?,
            None => ArenaConfig::default(),
        };
        if let Some(p) = &self.map {
            let path = resolve(p);
            let map: MapSpec = serde_json::from_str(&read_text(&path)?).map_err(|e| HarnessError::Json {
                path: path.clone(),
                msg: e.to_string(),
            })?;
            arena.map = map;
            arena.validate()?;
        }
        let tree = match &self.tree {
            Some(p) => {
                let path = resolve(p);
                BtNode::from_json(&read_text(&path)?).map_err(|e| HarnessError::Json { path, msg: e.to_string() })?
            }
            None => default_tree(),
        };
        let tips = match &self.table {
            Some(p) => TipTable::from_json(&read_text(&resolve(p))?)?,
            None => TipTable::default_table(),
        };
        Ok(ExperimentInputs { arena, tree, tips })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentInputs {
    pub arena: ArenaConfig,
    pub tree: BtNode,
    pub tips: TipTable,
}

impl Default for ExperimentInputs {
    fn default() -> Self {
        Self {
            arena: ArenaConfig::default(),
            tree: default_tree(),
            tips: TipTable::default_table(),
        }
    }
}

#[derive(Debug, Clone)]
struct Job {
    id: String,
    seed: u64,
    condition: Condition,
    novice: NoviceParams,
    group: Option<Condition>,
    phase: Option<Phase>,
}

fn jobs(spec: &ExperimentSpec) -> Vec<Job> {
    let m = u64::from(spec.matches);
    let mut out = Vec::new();
    match spec.protocol {
        Protocol::Conditions => {
            for &condition in &spec.conditions {
                for i in 0..m {
                    out.push(Job {
                        id: format!("{condition}-{i:03}"),
                        seed: spec.base_seed + i,
                        condition,
                        novice: spec.novice,
                        group: None,
                        phase: None,
                    });
                }
            }
        }
        Protocol::BeforeAfter => {
            for &group in spec.conditions.iter().filter(|c| c.has_tutor()) {
                let mut push = |phase: Phase, idx: u64, condition: Condition, novice: NoviceParams| {
                    out.push(Job {
                        id: format!("{group}-{phase}-{idx:03}"),
                        seed: spec.base_seed + idx,
                        condition,
                        novice,
                        group: Some(group),
                        phase: Some(phase),
                    });
                };
                for i in 0..m {
                    push(Phase::Before, i, Condition::Baseline, spec.novice);
                }
                push(Phase::WithTutor, m, group, spec.novice);
                for i in 0..m {
                    push(Phase::After, m + 1 + i, Condition::Baseline, spec.after_params());
                }
            }
        }
    }
    out
}

/// Records and reports of a finished experiment.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub records: Vec<MatchRecord>,
    pub novice: UnitId,
    /// One report per condition (conditions protocol).
    pub reports: Vec<SeriesReport>,
    /// Before/after table (before_after protocol).
    pub phase_report: Option<ExperimentReport>,
    pub csv: String,
}

/// Runs every match of `spec`, handing each outcome to `sink` as it finishes,
/// then aggregates the novice's KDA.
pub fn run_experiment<F>(spec: &ExperimentSpec, inputs: &ExperimentInputs, sink: F) -> Result<ExperimentResult, HarnessError>
where
    F: Fn(&MatchOutcome) -> Result<(), HarnessError> + Sync,
{
    spec.validate()?;
    let mut base = MatchSetup::new(inputs.arena.clone(), Condition::Baseline);
    base.tree = inputs.tree.clone();
    base.tips = inputs.tips.clone();
    if let Some(t) = &spec.tutor {
        base.tutor = t.clone();
    }
    let run = |job: &Job| -> Result<MatchRecord, HarnessError> {
        let mut setup = base.clone().with_novice(job.novice);
        setup.condition = job.condition;
        let fail = |e: HarnessError| HarnessError::MatchFailed {
            seed: job.seed,
            source: Box::new(e),
        };
        let mut outcome = run_match(&setup, job.seed).map_err(fail)?.labelled(job.group, job.phase);
        outcome.record.match_id = job.id.clone();
        outcome.record.event_log = format!("{}.events.jsonl", job.id);
        sink(&outcome).map_err(fail)?;
        Ok(outcome.record)
    };
    let jobs = jobs(spec);
    #[cfg(feature = "parallel")]
    let records: Vec<MatchRecord> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect::<Result<_, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let records: Vec<MatchRecord> = jobs.iter().map(run).collect::<Result<_, _>>()?;

    let novice = records[0].novice;
    let (reports, phase_report, csv) = match spec.protocol {
        Protocol::Conditions => {
            let reports = condition_reports(&records, novice)?;
            let csv = write_reports(&reports);
            (reports, None, csv)
        }
        Protocol::BeforeAfter => {
            let report = experiment_report(&records, novice)?;
            let csv = report.to_csv();
            (Vec::new(), Some(report), csv)
        }
    };
    Ok(ExperimentResult {
        records,
        novice,
        reports,
        phase_report,
        csv,
    })
}

/// Runs an experiment and writes records, logs, `report.csv` and `report.json` under `out`.
pub fn run_experiment_to_dir(spec: &ExperimentSpec, inputs: &ExperimentInputs, out: &Path) -> Result<ExperimentResult, HarnessError> {
    let store = MatchStore::create(out)?;
    let result = run_experiment(spec, inputs, |o| store.save(o).map(|_| ()))?;
    write(&out.join("report.csv"), result.csv.as_bytes())?;
    let json = match &result.phase_report {
        Some(r) => serde_json::to_string_pretty(r),
        None => serde_json::to_string_pretty(&result.reports),
    }
    .expect("reports serialize");
    write(&out.join("report.json"), (json + "\n").as_bytes())?;
    Ok(result)
}
