//! Headless experiment driver: scripted heroes, match sessions, batch
//! experiments, persistence and replay verification.

mod experiment;
mod policy;
mod replay;
mod session;
mod store;

pub use experiment::{run_experiment, run_experiment_to_dir, ExperimentInputs, ExperimentResult, ExperimentSpec, Protocol};
pub use policy::{frontline, Mode, NoviceParams, ScriptedHero, DECISION_PERIOD, RETREAT_TIPS};
pub use replay::{parse_log, replay, resimulate, resimulate_matches, verify, Replay, ReplayError};
pub use session::{assign_roles, checksum, run_match, MatchOutcome, MatchSession, MatchSetup, NoviceControl, Roles};
pub use store::{load_record, read_text, MatchStore};

use std::path::{Path, PathBuf};

use crate::analytics::AnalyticsError;
use crate::arena::ConfigError;
use crate::tips::TableError;
use crate::tutor::TutorError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Tutor(#[from] TutorError),
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("{}: {msg}", path.display())]
    Json { path: PathBuf, msg: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error("match with seed {seed} failed: {source}")]
    MatchFailed { seed: u64, source: Box<HarnessError> },
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Bad input detected before any simulation ran, as opposed to a runtime failure.
    pub fn is_validation(&self) -> bool {
        match self {
            HarnessError::Config(_)
            | HarnessError::Table(_)
            | HarnessError::Spec(_)
            | HarnessError::Json { .. } => true,
            HarnessError::Tutor(e) => matches!(e, TutorError::Config(_) | TutorError::InvalidTree(_)),
            HarnessError::MatchFailed { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
