//! Behavior trees of sequencers, selectors, conditions and actions.
//!
//! Trees are memoryless: every tick re-evaluates from the root. `Running`
//! stops a sequencer like `Failure` and stops a selector like `Success`.

mod engine;
mod node;

pub use engine::{
    tick, validate, ActionOutcome, BehaviorTree, Blackboard, KeySet, Registry, Status, TickError, ValidationError,
};
pub use node::BtNode;
