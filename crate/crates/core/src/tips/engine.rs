use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::table::{Anchor, PingStyle, Scope, TipRule, TipTable, TriggerSpec};
use crate::arena::{GameState, PingKind, Team, Tick, Unit, UnitId, UnitKind, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipPing {
    pub kind: PingKind,
    pub pos: Vec2,
}

/// One fired tip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TipEvent {
    pub tick: Tick,
    pub rule: String,
    pub recipients: Vec<UnitId>,
    pub message: String,
    pub ping: Option<TipPing>,
}

/// Last-fired tick per (rule id, recipient).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThrottleState {
    last: BTreeMap<(String, UnitId), Tick>,
    disabled: bool,
}

impl ThrottleState {
    pub fn new() -> Self {
        Self::default()
    }

    /// A throttle that never suppresses anything.
    pub fn disabled() -> Self {
        Self {
            disabled: true,
            ..Self::default()
        }
    }

    pub fn last_fired(&self, rule: &str, recipient: UnitId) -> Option<Tick> {
        self.last.get(&(rule.to_string(), recipient)).copied()
    }

    fn open(&self, rule: &TipRule, recipient: UnitId, now: Tick) -> bool {
        self.disabled
            || self
                .last_fired(&rule.id, recipient)
                .is_none_or(|t| now >= t + rule.cooldown)
    }

    fn fire(&mut self, rule: &str, recipient: UnitId, now: Tick) {
        if !self.disabled {
            self.last.insert((rule.to_string(), recipient), now);
        }
    }
}

/// Whether `spec` holds for `subject` in `state`. Dead or unknown subjects never match.
pub fn trigger_holds(spec: &TriggerSpec, state: &GameState, subject: UnitId) -> bool {
    matched(spec, state, subject).is_some()
}

/// `Some(threat position)` when the trigger holds.
fn matched(spec: &TriggerSpec, state: &GameState, subject: UnitId) -> Option<Vec2> {
    let me = state.unit(subject).filter(|u| u.alive)?;
    let enemy = me.team.opponent();
    let nearest = |units: Vec<&Unit>| {
        units
            .into_iter()
            .min_by(|a, b| a.pos.distance(me.pos).total_cmp(&b.pos.distance(me.pos)).then(a.id.cmp(&b.id)))
            .map(|u| u.pos)
    };
    match *spec {
        TriggerSpec::LowHealth { frac } => (me.hp / me.max_hp < frac)
            .then(|| nearest(state.team_heroes(enemy).filter(|h| h.alive).collect()).unwrap_or(me.pos)),
        TriggerSpec::InTowerRange => state
            .living()
            .filter(|t| t.kind == UnitKind::Tower && t.team == enemy && t.pos.distance(me.pos) <= t.attack.range)
            .find(|t| {
                t.target == Some(subject)
                    || !state
                        .living()
                        .any(|m| m.kind == UnitKind::Minion && m.team == me.team && m.pos.distance(t.pos) <= t.attack.range)
            })
            .map(|t| t.pos),
        TriggerSpec::EnemyFocus { radius, min_count } => {
            let near: Vec<&Unit> = state
                .team_heroes(enemy)
                .filter(|h| h.alive && h.pos.distance(me.pos) <= radius)
                .collect();
            (near.len() >= min_count as usize).then(|| nearest(near)).flatten()
        }
        TriggerSpec::MinionAggro { min_count } => {
            let hitting: Vec<&Unit> = state
                .living()
                .filter(|m| {
                    m.kind == UnitKind::Minion
                        && m.team == enemy
                        && m.target == Some(subject)
                        && m.pos.distance(me.pos) <= m.attack.range + 1e-6
                })
                .collect();
            (hitting.len() >= min_count as usize).then(|| nearest(hitting)).flatten()
        }
    }
}

/// Heroes a rule is evaluated for: the partner, or every living hero on the partner's team.
pub fn subjects(rule: &TipRule, state: &GameState, partner: UnitId) -> Vec<UnitId> {
    match rule.scope {
        Scope::Partner => vec![partner],
        Scope::Team => {
            let team: Option<Team> = state.unit(partner).map(|u| u.team);
            team.map(|t| state.team_heroes(t).filter(|h| h.alive).map(|h| h.id).collect())
                .unwrap_or_default()
        }
    }
}

/// Runs every rule of the table against the current tick.
pub fn evaluate(state: &GameState, partner: UnitId, table: &TipTable, throttle: &mut ThrottleState) -> Vec<TipEvent> {
    let now = state.tick;
    let mut out = Vec::new();
    for rule in table.rules() {
        for subject in subjects(rule, state, partner) {
            let Some(threat) = matched(&rule.trigger, state, subject) else {
                continue;
            };
            if !throttle.open(rule, subject, now) {
                continue;
            }
            throttle.fire(&rule.id, subject, now);
            let subject_pos = state.unit(subject).map(|u| u.pos).unwrap_or(threat);
            let ping = match rule.ping.kind {
                PingStyle::None => None,
                style => {
                    let pos = match rule.ping.anchor {
                        Anchor::PartnerPos => subject_pos,
                        Anchor::ThreatPos => threat,
                    };
                    Some(TipPing {
                        kind: if style == PingStyle::Danger { PingKind::Danger } else { PingKind::Caution },
                        pos: pos.clamp_to(state.map.size),
                    })
                }
            };
            out.push(TipEvent {
                tick: now,
                rule: rule.id.clone(),
                recipients: vec![subject],
                message: rule.message.clone(),
                ping,
            });
        }
    }
    out
}

/// A tip table paired with its throttle for one match.
#[derive(Debug, Clone)]
pub struct TipEngine {
    pub table: TipTable,
    pub throttle: ThrottleState,
}

impl TipEngine {
    pub fn new(table: TipTable) -> Self {
        Self {
            table,
            throttle: ThrottleState::new(),
        }
    }

    pub fn evaluate(&mut self, state: &GameState, partner: UnitId) -> Vec<TipEvent> {
        evaluate(state, partner, &self.table, &mut self.throttle)
    }
}
