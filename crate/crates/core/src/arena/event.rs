use serde::{Deserialize, Serialize};

use super::geometry::Vec2;
use super::spell::SpellSlot;
use super::unit::{Haste, Team, Tick, UnitId};
use crate::tips::TipEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PingKind {
    Danger,
    Caution,
    Assist,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CastTarget {
    Unit(UnitId),
    Point(Vec2),
    /// No explicit target (global spells).
    Caster,
}

/// One order for one hero for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cmd")]
pub enum Command {
    MoveTo { pos: Vec2 },
    Attack { target: UnitId },
    Cast { slot: SpellSlot, target: CastTarget },
    Ping { pos: Vec2, kind: PingKind },
    Idle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    UnknownUnit,
    NotAHero,
    Dead,
    Silenced,
    NotLearned,
    OnCooldown,
    NoMana,
    OutOfRange,
    InvalidTarget,
    InvalidPosition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum EventKind {
    /// Header written by the match driver before tick 0 is simulated.
    MatchStart {
        seed: u64,
        config_hash: String,
        heroes: Vec<UnitId>,
        tutor: Option<UnitId>,
        haste: Option<Haste>,
    },
    CommandIssued {
        hero: UnitId,
        command: Command,
    },
    CommandRejected {
        hero: UnitId,
        command: Command,
        reason: RejectReason,
    },
    SpellCast {
        caster: UnitId,
        slot: SpellSlot,
        target: CastTarget,
        affected: Vec<UnitId>,
    },
    Damage {
        src: UnitId,
        dst: UnitId,
        amount: f64,
    },
    Heal {
        src: UnitId,
        dst: UnitId,
        amount: f64,
    },
    /// A hero died. `killer` is the source of the final damage.
    Kill {
        killer: Option<UnitId>,
        victim: UnitId,
        assists: Vec<UnitId>,
    },
    MinionDied {
        victim: UnitId,
        killer: Option<UnitId>,
    },
    TowerDestroyed {
        id: UnitId,
        killer: Option<UnitId>,
    },
    NexusDestroyed {
        id: UnitId,
    },
    WaveSpawned {
        minions: Vec<UnitId>,
    },
    LevelUp {
        hero: UnitId,
        level: u32,
    },
    Respawn {
        hero: UnitId,
    },
    Ping {
        pos: Vec2,
        kind: PingKind,
        author: Option<UnitId>,
    },
    TipEmitted {
        tip: TipEvent,
    },
    MatchEnd {
        winner: Option<Team>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: Tick,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl Event {
    pub fn new(tick: Tick, kind: EventKind) -> Self {
        Self { tick, kind }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("events serialize")
    }
}

/// Serializes events as JSON Lines, one event per line, newline-terminated.
pub fn to_jsonl(events: &[Event]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_json_line());
        out.push('\n');
    }
    out
}
