//! Deterministic tick-based MOBA arena: three lanes, towers, minion waves,
//! heroes with spell kits, gold and xp, and a nexus win condition.

mod config;
mod credit;
mod event;
mod geometry;
mod spell;
mod state;
mod step;
mod unit;

pub use config::{
    ArenaConfig, ConfigError, Fountain, GameConfig, HeroKit, HeroSlot, MapSpec, MinionStats, NexusPlacement,
    RewardTable, Roster, TowerPlacement, TowerStats, UnitStats, WaveComposition,
};
pub use credit::{resolve_kill_credit, KillCredit};
pub use event::{to_jsonl, CastTarget, Command, Event, EventKind, PingKind, RejectReason};
pub use geometry::Vec2;
pub use spell::{SpellKind, SpellSlot, SpellSpec, SpellState};
pub use state::{new_match, AggroMark, DamageMark, GameState};
pub use step::{effective_speed, heading_toward_injured_ally, nexus_vulnerable, step, tower_target};
pub use unit::{Attack, Haste, Lane, Order, StatusEffect, StatusKind, Team, Tick, Unit, UnitId, UnitKind};

/// Commands for one tick, keyed by hero.
pub type CommandSet = std::collections::BTreeMap<UnitId, Command>;
