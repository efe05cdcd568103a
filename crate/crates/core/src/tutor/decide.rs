use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::follow::follow_point;
use super::{TutorConfig, TutorError};
use crate::arena::{CastTarget, Command, GameState, SpellKind, SpellSlot, Tick, Unit, UnitId, Vec2};
use crate::bt::{ActionOutcome, BehaviorTree, Blackboard, BtNode, KeySet, Registry};

pub const DEFAULT_TREE_JSON: &str = include_str!("../../assets/default_tree.json");

/// Everything the tutor's tree may look at during one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TutorView {
    pub tick: Tick,
    pub me: UnitId,
    pub partner: UnitId,
    pub self_frac: f64,
    pub spawn: Vec2,
    pub follow_point: Vec2,
    pub retreat_threshold: f64,
    /// Living allied heroes, tutor included, below the ult threshold.
    pub ult_candidates: usize,
    pub ult_min_allies: u32,
    pub ult: Option<SpellSlot>,
    /// Enemy hero nearest the partner inside the engage radius.
    pub cc_target: Option<(UnitId, Vec2)>,
    pub silence: Option<SpellSlot>,
    pub silence_in_range: bool,
    pub slow: Option<SpellSlot>,
    pub slow_in_range: bool,
    pub heal: Option<SpellSlot>,
    /// Most injured ally below the heal threshold within heal range.
    pub heal_target: Option<UnitId>,
}

/// Slot of a ready spell of `kind`: learned, off cooldown, affordable, caster not silenced.
pub fn ready_spell(state: &GameState, hero: &Unit, kind: SpellKind) -> Option<(SpellSlot, f64)> {
    if !hero.alive || hero.is_silenced() {
        return None;
    }
    let kit = state.config.kits.get(hero.kit.as_deref()?)?;
    let spec = kit.spells.iter().find(|s| s.kind == kind)?;
    let st = hero.spell(spec.slot)?;
    (st.rank > 0 && st.cooldown_remaining == 0 && hero.mana >= spec.mana_cost).then_some((spec.slot, spec.range))
}

impl TutorView {
    pub fn observe(state: &GameState, me: UnitId, partner: UnitId, cfg: &TutorConfig) -> Option<Self> {
        let tutor = state.unit(me)?;
        let mate = state.unit(partner)?;
        let team = tutor.team;
        let ult_candidates = state
            .team_heroes(team)
            .filter(|h| h.alive && h.hp_frac() < cfg.ult_threshold)
            .count();
        let cc_target = mate
            .alive
            .then(|| {
                state
                    .team_heroes(team.opponent())
                    .filter(|e| e.alive && e.pos.distance(mate.pos) <= cfg.cc_engage_radius)
                    .min_by(|a, b| {
                        a.pos
                            .distance(mate.pos)
                            .total_cmp(&b.pos.distance(mate.pos))
                            .then(a.id.cmp(&b.id))
                    })
                    .map(|e| (e.id, e.pos))
            })
            .flatten();
        let in_range = |spell: Option<(SpellSlot, f64)>| -> (Option<SpellSlot>, bool) {
            match (spell, cc_target) {
                (Some((slot, range)), Some((_, pos))) => (Some(slot), tutor.pos.distance(pos) <= range),
                (Some((slot, _)), None) => (Some(slot), false),
                (None, _) => (None, false),
            }
        };
        let (silence, silence_in_range) = in_range(ready_spell(state, tutor, SpellKind::AoeSilenceRoot));
        let (slow, slow_in_range) = in_range(ready_spell(state, tutor, SpellKind::AoeDamageSlow));
        let heal_spell = ready_spell(state, tutor, SpellKind::SingleTargetHeal);
        let heal_range = heal_spell.map_or(0.0, |(_, r)| r);
        let heal_target = state
            .team_heroes(team)
            .filter(|h| {
                h.id != me
                    && h.alive
                    && h.hp < h.max_hp
                    && h.hp_frac() < cfg.heal_threshold
                    && tutor.pos.distance(h.pos) <= heal_range
            })
            .min_by(|a, b| a.hp_frac().total_cmp(&b.hp_frac()).then(a.id.cmp(&b.id)))
            .map(|h| h.id);
        Some(TutorView {
            tick: state.tick,
            me,
            partner,
            self_frac: tutor.hp_frac(),
            spawn: state.spawn(team),
            follow_point: follow_point(state, me, partner, cfg)?,
            retreat_threshold: cfg.retreat_threshold,
            ult_candidates,
            ult_min_allies: cfg.ult_min_allies,
            ult: ready_spell(state, tutor, SpellKind::GlobalTeamHeal).map(|(s, _)| s),
            cc_target,
            silence,
            silence_in_range,
            slow,
            slow_in_range,
            heal: heal_spell.map(|(s, _)| s),
            heal_target,
        })
    }
}

fn cast(slot: Option<SpellSlot>, target: CastTarget) -> ActionOutcome<Command> {
    match slot {
        Some(slot) => ActionOutcome::success(Command::Cast { slot, target }),
        None => ActionOutcome::failure(),
    }
}

/// Predicates and actions available to tutor trees.
pub fn registry() -> &'static Registry<TutorView, Command> {
    static REGISTRY: OnceLock<Registry<TutorView, Command>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        Registry::new()
            .condition("ult_needed", |v: &TutorView| {
                v.ult.is_some() && v.ult_candidates >= v.ult_min_allies as usize
            })
            .condition("enemy_near_partner", |v: &TutorView| v.cc_target.is_some())
            .condition("can_silence", |v: &TutorView| v.silence.is_some() && v.silence_in_range)
            .condition("can_slow", |v: &TutorView| v.slow.is_some() && v.slow_in_range)
            .condition("ally_needs_heal", |v: &TutorView| v.heal.is_some() && v.heal_target.is_some())
            .condition("self_low", |v: &TutorView| v.self_frac < v.retreat_threshold)
            .action("cast_ult", |v: &TutorView| cast(v.ult, CastTarget::Caster))
            .action("cast_silence", |v: &TutorView| match v.cc_target {
                Some((_, pos)) => cast(v.silence, CastTarget::Point(pos)),
                None => ActionOutcome::failure(),
            })
            .action("cast_slow", |v: &TutorView| match v.cc_target {
                Some((_, pos)) => cast(v.slow, CastTarget::Point(pos)),
                None => ActionOutcome::failure(),
            })
            .action("cast_heal", |v: &TutorView| match v.heal_target {
                Some(id) => cast(v.heal, CastTarget::Unit(id)),
                None => ActionOutcome::failure(),
            })
            .action("retreat", |v: &TutorView| ActionOutcome::success(Command::MoveTo { pos: v.spawn }))
            .action("follow", |v: &TutorView| ActionOutcome::success(Command::MoveTo { pos: v.follow_point }))
    })
}

pub fn registry_keys() -> KeySet {
    registry().keys()
}

/// Priority branch of the default tree an action belongs to (0 for unknown actions).
pub fn branch_of(action: &str) -> u8 {
    match action {
        "cast_ult" => 1,
        "cast_silence" | "cast_slow" => 2,
        "cast_heal" => 3,
        "retreat" => 4,
        "follow" => 5,
        _ => 0,
    }
}

pub fn default_tree() -> BtNode {
    BtNode::from_json(DEFAULT_TREE_JSON).expect("shipped tree parses")
}

/// One tutor decision, as written to the decision trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub tick: Tick,
    pub branch: u8,
    pub action: Option<String>,
    pub command: Command,
}

/// The tutor bound to one hero and one partner in one match.
#[derive(Debug, Clone)]
pub struct TutorState {
    pub hero: UnitId,
    pub partner: UnitId,
    pub tree: BehaviorTree,
    pub config: TutorConfig,
}

impl TutorState {
    /// Validates the config and tree and picks the partner.
    pub fn new(state: &GameState, hero: UnitId, config: TutorConfig, tree: BtNode) -> Result<Self, TutorError> {
        config.validate()?;
        let me = state.unit(hero).filter(|u| u.is_hero()).ok_or(TutorError::NotAHero(hero))?;
        let partner = super::select_partner(state, me.team, Some(hero))?;
        let tree = BehaviorTree::build(tree, &registry_keys()).map_err(TutorError::InvalidTree)?;
        Ok(Self {
            hero,
            partner,
            tree,
            config,
        })
    }

    /// Ticks the tree and returns exactly one command. A tree that requests nothing yields `Idle`.
    pub fn decide(&self, state: &GameState) -> Result<Decision, TutorError> {
        let view = TutorView::observe(state, self.hero, self.partner, &self.config).ok_or(TutorError::NotAHero(self.hero))?;
        let tick = view.tick;
        let mut board = Blackboard::new(view);
        self.tree.tick(registry(), &mut board)?;
        Ok(match board.take_request() {
            Some((action, command)) => Decision {
                tick,
                branch: branch_of(&action),
                action: Some(action),
                command,
            },
            None => Decision {
                tick,
                branch: 0,
                action: None,
                command: Command::Idle,
            },
        })
    }
}

/// Decision trace as JSON Lines.
pub fn trace_to_jsonl(trace: &[Decision]) -> String {
    trace
        .iter()
        .map(|d| serde_json::to_string(d).expect("decisions serialize") + "\n")
        .collect()
}
