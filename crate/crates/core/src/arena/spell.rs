use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpellSlot {
    Q,
    W,
    E,
    R,
}

impl fmt::Display for SpellSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpellKind {
    /// Damages and slows every enemy inside `radius` of the target point.
    AoeDamageSlow,
    /// Restores hp to one allied hero other than the caster.
    SingleTargetHeal,
    /// Silences and roots every enemy inside `radius` of the target point.
    AoeSilenceRoot,
    /// Restores hp to every living allied hero, caster included. Range is ignored.
    GlobalTeamHeal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpellSpec {
    pub slot: SpellSlot,
    pub kind: SpellKind,
    pub range: f64,
    #[serde(default)]
    pub radius: f64,
    pub magnitude: f64,
    #[serde(default)]
    pub magnitude_per_rank: f64,
    /// Slow percentage for `AoeDamageSlow`.
    #[serde(default)]
    pub status_pct: f64,
    #[serde(default)]
    pub status_duration: u32,
    pub cooldown: u32,
    pub mana_cost: f64,
    pub max_rank: u32,
}

impl SpellSpec {
    pub fn magnitude_at(&self, rank: u32) -> f64 {
        self.magnitude + self.magnitude_per_rank * rank.saturating_sub(1) as f64
    }
}

/// Per-hero runtime state of one spell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpellState {
    pub slot: SpellSlot,
    pub rank: u32,
    pub cooldown_remaining: u32,
}
