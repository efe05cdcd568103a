//! The support tutor: partner selection, a movement layer that trails the partner
//! at a configurable distance, and a behavior-tree skill layer.

mod config;
mod decide;
mod follow;
mod partner;

pub use config::TutorConfig;
pub use decide::{
    branch_of, default_tree, ready_spell, registry, registry_keys, trace_to_jsonl, Decision, TutorState, TutorView,
    DEFAULT_TREE_JSON,
};
pub use follow::{follow_point, follow_point_at, heading, passive_speed};
pub use partner::select_partner;

use crate::arena::UnitId;
use crate::bt::{TickError, ValidationError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TutorError {
    #[error("no allied hero is eligible as partner")]
    NoEligibleAlly,
    #[error("unit {0} is not a hero")]
    NotAHero(UnitId),
    #[error("invalid tutor config: {0}")]
    Config(String),
    #[error("invalid tutor tree: {0:?}")]
    InvalidTree(Vec<ValidationError>),
    #[error(transparent)]
    Tick(#[from] TickError),
}
