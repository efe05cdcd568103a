use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::arena::{CastTarget, Command, GameState, Order, SpellKind, Tick, Unit, UnitId, UnitKind, Vec2};
use crate::tips::TipEvent;
use crate::tutor::ready_spell;

/// Tips that a compliant hero answers by walking home.
pub const RETREAT_TIPS: [&str; 2] = ["low_health", "tower_danger"];

/// Ticks between routine lane decisions.
pub const DECISION_PERIOD: Tick = 10;
/// Enemy heroes closer than this are candidates for an engage roll.
pub const ENGAGE_RADIUS: f64 = 140.0;
pub const FARM_RADIUS: f64 = 120.0;
/// Hp fraction at which a retreating hero heads back to lane.
pub const RECOVERED_FRAC: f64 = 0.9;

/// Behavior knobs of a scripted hero. The novice uses them with tips enabled;
/// lane bots use them with `tip_compliance` unused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoviceParams {
    pub reaction_delay: Tick,
    pub retreat_threshold: f64,
    /// Standard deviation of the jitter added to lane positioning targets.
    pub positioning_error: f64,
    /// Probability of engaging a nearby enemy hero per decision.
    pub aggression: f64,
    pub tip_compliance: f64,
}

impl Default for NoviceParams {
    fn default() -> Self {
        Self {
            reaction_delay: 10,
            retreat_threshold: 0.1,
            positioning_error: 15.0,
            aggression: 0.7,
            tip_compliance: 1.0,
        }
    }
}

impl NoviceParams {
    /// Fixed-aggression lane-push bot.
    pub fn lane_bot() -> Self {
        Self {
            reaction_delay: 0,
            retreat_threshold: 0.25,
            positioning_error: 8.0,
            aggression: 0.5,
            tip_compliance: 0.0,
        }
    }

    /// Preset standing in for a novice who has played with the tutor: retreats
    /// at the low-health tip threshold on their own and trades less recklessly.
    pub fn after_tutoring(&self) -> Self {
        Self {
            retreat_threshold: self.retreat_threshold.max(0.35),
            aggression: self.aggression * 0.75,
            positioning_error: self.positioning_error * 0.75,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(HarnessError::Spec(format!("novice {name} must be in [0, 1], got {v}")))
            }
        };
        prob("retreat_threshold", self.retreat_threshold)?;
        prob("aggression", self.aggression)?;
        prob("tip_compliance", self.tip_compliance)?;
        if !(self.positioning_error.is_finite() && self.positioning_error >= 0.0) {
            return Err(HarnessError::Spec(format!(
                "novice positioning_error must be finite and nonnegative, got {}",
                self.positioning_error
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Laning,
    Retreating,
}

/// Scripted controller for one hero: farms and pushes its lane, rolls to fight
/// nearby enemy heroes, and walks to the fountain when hurt or told to.
#[derive(Debug, Clone)]
pub struct ScriptedHero {
    pub hero: UnitId,
    pub params: NoviceParams,
    pub mode: Mode,
    /// Tick at which an accepted retreat tip turns into a command.
    pub pending_retreat: Option<Tick>,
}

impl ScriptedHero {
    pub fn new(hero: UnitId, params: NoviceParams) -> Self {
        Self {
            hero,
            params,
            mode: Mode::Laning,
            pending_retreat: None,
        }
    }

    /// Command for this tick, or `None` to keep the current order.
    pub fn decide(&mut self, state: &GameState, tips: &[TipEvent], rng: &mut ChaCha8Rng) -> Option<Command> {
        let me = state.unit(self.hero)?;
        if !me.alive {
            self.mode = Mode::Laning;
            self.pending_retreat = None;
            return None;
        }
        let now = state.tick;
        let spawn = state.spawn(me.team);
        let home = Command::MoveTo { pos: spawn };

        for tip in tips.iter().filter(|t| t.recipients.contains(&self.hero)) {
            if !RETREAT_TIPS.contains(&tip.rule.as_str()) || self.pending_retreat.is_some() || self.mode == Mode::Retreating {
                continue;
            }
            if rng.random_bool(self.params.tip_compliance) {
                self.pending_retreat = Some(tip.tick + self.params.reaction_delay);
            }
        }
        if let Some(due) = self.pending_retreat {
            if now >= due {
                self.pending_retreat = None;
                self.mode = Mode::Retreating;
                return Some(home);
            }
        }
        if self.mode == Mode::Retreating {
            if me.hp_frac() >= RECOVERED_FRAC {
                self.mode = Mode::Laning;
            } else {
                let heading_home = matches!(me.order, Order::MoveTo { pos } if pos == spawn);
                return (!heading_home && me.pos.distance(spawn) > 1.0).then_some(home);
            }
        }
        if me.hp_frac() < self.params.retreat_threshold {
            self.mode = Mode::Retreating;
            self.pending_retreat = None;
            return Some(home);
        }
        if !(now + Tick::from(self.hero.0)).is_multiple_of(DECISION_PERIOD) {
            return None;
        }
        self.lane_decision(state, me, rng)
    }

    fn lane_decision(&self, state: &GameState, me: &Unit, rng: &mut ChaCha8Rng) -> Option<Command> {
        let enemy = me.team.opponent();
        let nearest = |kind: UnitKind, radius: f64| {
            state
                .living_within(enemy, me.pos, radius)
                .filter(|u| u.kind == kind)
                .min_by(|a, b| me.pos.distance(a.pos).total_cmp(&me.pos.distance(b.pos)).then(a.id.cmp(&b.id)))
        };
        if let Some(foe) = nearest(UnitKind::Hero, ENGAGE_RADIUS) {
            if rng.random_bool(self.params.aggression) {
                if let Some((slot, range)) = ready_spell(state, me, SpellKind::AoeDamageSlow) {
                    if me.pos.distance(foe.pos) <= range {
                        return Some(Command::Cast {
                            slot,
                            target: CastTarget::Point(foe.pos),
                        });
                    }
                }
                return Some(Command::Attack { target: foe.id });
            }
        }
        let weakest_minion = state
            .living_within(enemy, me.pos, FARM_RADIUS)
            .filter(|u| u.kind == UnitKind::Minion)
            .min_by(|a, b| a.hp.total_cmp(&b.hp).then(a.id.cmp(&b.id)));
        if let Some(m) = weakest_minion {
            return Some(Command::Attack { target: m.id });
        }
        if let Some(s) = self.siege_target(state, me) {
            return Some(Command::Attack { target: s });
        }
        let front = frontline(state, me);
        let jitter = Normal::new(0.0, self.params.positioning_error).expect("validated stddev");
        let pos = Vec2::new(front.x + jitter.sample(rng), front.y + jitter.sample(rng));
        Some(Command::MoveTo { pos })
    }

    /// Enemy structure in reach that allied minions are already tanking.
    fn siege_target(&self, state: &GameState, me: &Unit) -> Option<UnitId> {
        let enemy = me.team.opponent();
        state
            .living_within(enemy, me.pos, FARM_RADIUS)
            .filter(|u| u.kind.is_structure())
            .filter(|s| vulnerable(state, s))
            .find(|s| {
                state
                    .living_within(me.team, s.pos, state.config.tower.range)
                    .any(|u| u.kind == UnitKind::Minion)
            })
            .map(|s| s.id)
    }
}

fn vulnerable(state: &GameState, s: &Unit) -> bool {
    s.kind != UnitKind::Nexus || crate::arena::nexus_vulnerable(state, s.team)
}

/// Where a laning hero stands: with its most advanced allied minion, else at its
/// outermost standing lane tower, else at its nexus.
pub fn frontline(state: &GameState, me: &Unit) -> Vec2 {
    let enemy_base = state.spawn(me.team.opponent());
    let progress = |u: &&Unit| u.pos.distance(enemy_base);
    let minion = state
        .living()
        .filter(|u| u.team == me.team && u.kind == UnitKind::Minion && u.lane == me.lane)
        .min_by(|a, b| progress(a).total_cmp(&progress(b)).then(a.id.cmp(&b.id)));
    if let Some(m) = minion {
        return m.pos;
    }
    let tower = state
        .living()
        .filter(|u| u.team == me.team && u.kind == UnitKind::Tower && u.lane == me.lane)
        .min_by(|a, b| progress(a).total_cmp(&progress(b)).then(a.id.cmp(&b.id)));
    if let Some(t) = tower {
        return t.pos;
    }
    state
        .living()
        .find(|u| u.team == me.team && u.kind == UnitKind::Nexus)
        .map_or(state.spawn(me.team), |n| n.pos)
}
