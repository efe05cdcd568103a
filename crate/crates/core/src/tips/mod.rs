//! Rule-based advisor: a lookup table of trigger rules evaluated every tick,
//! emitting throttled messages and pings to the partner or the whole team.

mod engine;
mod table;

pub use engine::{evaluate, subjects, trigger_holds, ThrottleState, TipEngine, TipEvent, TipPing};
pub use table::{Anchor, PingSpec, PingStyle, Scope, TableError, TipRule, TipTable, TriggerSpec, DEFAULT_TABLE_JSON};
