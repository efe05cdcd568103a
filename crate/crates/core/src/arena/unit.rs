use std::fmt;

use serde::{Deserialize, Serialize};

use super::geometry::Vec2;
use super::spell::{SpellSlot, SpellState};

/// Simulation time step index.
pub type Tick = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitId(pub u32);

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Team {
    Blue,
    Red,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::Blue => Team::Red,
            Team::Red => Team::Blue,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Lane {
    Top,
    Mid,
    Bot,
}

impl Lane {
    pub const ALL: [Lane; 3] = [Lane::Top, Lane::Mid, Lane::Bot];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitKind {
    Hero,
    Minion,
    Tower,
    Nexus,
}

impl UnitKind {
    pub fn is_structure(self) -> bool {
        matches!(self, UnitKind::Tower | UnitKind::Nexus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "pct")]
pub enum StatusKind {
    Slow(f64),
    Root,
    Silence,
    SpeedBoost(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatusEffect {
    #[serde(flatten)]
    pub kind: StatusKind,
    pub expires_at: Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attack {
    pub range: f64,
    pub damage: f64,
    pub cooldown: u32,
    pub remaining: u32,
}

/// Standing order a hero keeps executing until replaced.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "order")]
pub enum Order {
    #[default]
    Idle,
    MoveTo { pos: Vec2 },
    Attack { target: UnitId },
}

/// Movement bonus granted while heading toward a wounded allied hero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Haste {
    /// Ally hp fraction below which the bonus applies.
    pub trigger: f64,
    pub boost_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub id: UnitId,
    pub kind: UnitKind,
    pub team: Team,
    pub pos: Vec2,
    pub hp: f64,
    pub max_hp: f64,
    pub mana: f64,
    pub max_mana: f64,
    pub move_speed: f64,
    pub attack: Attack,
    pub statuses: Vec<StatusEffect>,
    pub gold: u32,
    pub xp: u32,
    pub level: u32,
    pub alive: bool,
    pub respawn_at: Option<Tick>,
    pub lane: Option<Lane>,
    /// Kit name for heroes.
    pub kit: Option<String>,
    pub spells: Vec<SpellState>,
    pub order: Order,
    /// Unit this one is currently auto-attacking, if any.
    pub target: Option<UnitId>,
    pub haste: Option<Haste>,
    /// Index of the next lane waypoint (minions).
    pub waypoint: usize,
    /// Displacement applied during the last movement phase.
    pub last_move: Vec2,
}

impl Unit {
    pub fn is_hero(&self) -> bool {
        self.kind == UnitKind::Hero
    }

    pub fn hp_frac(&self) -> f64 {
        self.hp / self.max_hp
    }

    pub fn has_status(&self, pred: impl Fn(&StatusKind) -> bool) -> bool {
        self.statuses.iter().any(|s| pred(&s.kind))
    }

    pub fn is_rooted(&self) -> bool {
        self.has_status(|k| matches!(k, StatusKind::Root))
    }

    pub fn is_silenced(&self) -> bool {
        self.has_status(|k| matches!(k, StatusKind::Silence))
    }

    pub fn spell(&self, slot: SpellSlot) -> Option<&SpellState> {
        self.spells.iter().find(|s| s.slot == slot)
    }

    pub fn spell_mut(&mut self, slot: SpellSlot) -> Option<&mut SpellState> {
        self.spells.iter_mut().find(|s| s.slot == slot)
    }

    /// Heals by `amount`, clamping at `max_hp`. Returns the hp actually restored.
    pub fn heal(&mut self, amount: f64) -> f64 {
        let before = self.hp;
        self.hp = (self.hp + amount.max(0.0)).min(self.max_hp);
        self.hp - before
    }

    /// Applies damage, clamping at zero. Returns the hp actually removed.
    pub fn take_damage(&mut self, amount: f64) -> f64 {
        let before = self.hp;
        self.hp = (self.hp - amount.max(0.0)).max(0.0);
        before - self.hp
    }

    /// Base speed after root, slow and speed-boost statuses (haste excluded).
    pub fn status_speed(&self) -> f64 {
        if self.is_rooted() {
            return 0.0;
        }
        let mut slow: f64 = 0.0;
        let mut boost: f64 = 0.0;
        for s in &self.statuses {
            match s.kind {
                StatusKind::Slow(p) => slow = slow.max(p),
                StatusKind::SpeedBoost(p) => boost = boost.max(p),
                _ => {}
            }
        }
        self.move_speed * (1.0 - slow / 100.0).max(0.0) * (1.0 + boost / 100.0)
    }
}
