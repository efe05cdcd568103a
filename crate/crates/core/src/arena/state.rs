use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ArenaConfig, ConfigError, GameConfig, HeroKit, HeroSlot, MapSpec};
use super::event::Event;
use super::geometry::Vec2;
use super::spell::SpellState;
use super::unit::{Attack, Order, Team, Tick, Unit, UnitId, UnitKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamageMark {
    pub attacker: UnitId,
    pub tick: Tick,
}

/// A hero hit an enemy hero standing inside `tower`'s range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggroMark {
    pub tower: UnitId,
    pub hero: UnitId,
    pub tick: Tick,
}

/// The whole world at one tick. Cloning yields an immutable snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    pub tick: Tick,
    pub units: BTreeMap<UnitId, Unit>,
    pub events_this_tick: Vec<Event>,
    pub rng: ChaCha8Rng,
    /// Damage taken per victim, oldest first, pruned to the assist window.
    pub recent_damage: BTreeMap<UnitId, Vec<DamageMark>>,
    pub aggro: Vec<AggroMark>,
    pub next_id: u32,
    pub winner: Option<Team>,
    pub ended: bool,
    pub config: Arc<GameConfig>,
    pub map: Arc<MapSpec>,
}

/// Builds the tick-0 state for a validated config.
pub fn new_match(config: &ArenaConfig) -> Result<GameState, ConfigError> {
    GameState::new(config.game.clone(), config.map.clone())
}

impl GameState {
    pub fn new(config: GameConfig, map: MapSpec) -> Result<Self, ConfigError> {
        config.validate()?;
        map.validate()?;
        let mut units = BTreeMap::new();
        let mut next = 1u32;
        let mut alloc = || {
            let id = UnitId(next);
            next += 1;
            id
        };
        for team in [Team::Blue, Team::Red] {
            for slot in config.slots(team) {
                let id = alloc();
                let kit = &config.kits[&slot.kit];
                units.insert(id, hero(id, team, &slot, kit, map.spawn(team)));
            }
        }
        for t in &map.towers {
            let id = alloc();
            let stats = &config.tower;
            units.insert(
                id,
                structure(id, UnitKind::Tower, t.team, t.pos, stats.max_hp, Some(t.lane), Attack {
                    range: stats.range,
                    damage: stats.damage,
                    cooldown: stats.cooldown,
                    remaining: 0,
                }),
            );
        }
        for n in &map.nexus {
            let id = alloc();
            let inert = Attack { range: 0.0, damage: 0.0, cooldown: 1, remaining: 0 };
            units.insert(id, structure(id, UnitKind::Nexus, n.team, n.pos, n.hp, None, inert));
        }
        Ok(GameState {
            tick: 0,
            units,
            events_this_tick: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
            recent_damage: BTreeMap::new(),
            aggro: Vec::new(),
            next_id: next,
            winner: None,
            ended: false,
            config: Arc::new(config),
            map: Arc::new(map),
        })
    }

    pub fn unit(&self, id: UnitId) -> Option<&Unit> {
        self.units.get(&id)
    }

    pub fn unit_mut(&mut self, id: UnitId) -> Option<&mut Unit> {
        self.units.get_mut(&id)
    }

    pub fn heroes(&self) -> impl Iterator<Item = &Unit> {
        self.units.values().filter(|u| u.is_hero())
    }

    pub fn team_heroes(&self, team: Team) -> impl Iterator<Item = &Unit> {
        self.heroes().filter(move |u| u.team == team)
    }

    pub fn hero_ids(&self, team: Team) -> Vec<UnitId> {
        self.team_heroes(team).map(|u| u.id).collect()
    }

    pub fn living(&self) -> impl Iterator<Item = &Unit> {
        self.units.values().filter(|u| u.alive)
    }

    /// Living units of `team` within `radius` of `pos`, in ascending id order.
    pub fn living_within(&self, team: Team, pos: Vec2, radius: f64) -> impl Iterator<Item = &Unit> {
        self.living()
            .filter(move |u| u.team == team && u.pos.distance(pos) <= radius)
    }

    pub fn spawn(&self, team: Team) -> Vec2 {
        self.map.spawn(team)
    }

    /// Hex SHA-256 over the serialized state.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("state serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub(crate) fn alloc_id(&mut self) -> UnitId {
        let id = UnitId(self.next_id);
        self.next_id += 1;
        id
    }
}

fn hero(id: UnitId, team: Team, slot: &HeroSlot, kit: &HeroKit, spawn: Vec2) -> Unit {
    let s = &kit.stats;
    let mut spells: Vec<SpellState> = kit
        .spells
        .iter()
        .map(|sp| SpellState { slot: sp.slot, rank: 0, cooldown_remaining: 0 })
        .collect();
    if let Some(first) = kit.skill_order.first() {
        if let Some(sp) = spells.iter_mut().find(|sp| sp.slot == *first) {
            sp.rank = 1;
        }
    }
    Unit {
        id,
        kind: UnitKind::Hero,
        team,
        pos: spawn,
        hp: s.max_hp,
        max_hp: s.max_hp,
        mana: s.max_mana,
        max_mana: s.max_mana,
        move_speed: s.move_speed,
        attack: Attack {
            range: s.attack_range,
            damage: s.attack_damage,
            cooldown: s.attack_cooldown,
            remaining: 0,
        },
        statuses: Vec::new(),
        gold: 0,
        xp: 0,
        level: 1,
        alive: true,
        respawn_at: None,
        lane: slot.lane,
        kit: Some(slot.kit.clone()),
        spells,
        order: Order::Idle,
        target: None,
        haste: None,
        waypoint: 0,
        last_move: Vec2::ZERO,
    }
}

fn structure(
    id: UnitId,
    kind: UnitKind,
    team: Team,
    pos: Vec2,
    hp: f64,
    lane: Option<super::unit::Lane>,
    attack: Attack,
) -> Unit {
    Unit {
        id,
        kind,
        team,
        pos,
        hp,
        max_hp: hp,
        mana: 0.0,
        max_mana: 0.0,
        move_speed: 0.0,
        attack,
        statuses: Vec::new(),
        gold: 0,
        xp: 0,
        level: 1,
        alive: true,
        respawn_at: None,
        lane,
        kit: None,
        spells: Vec::new(),
        order: Order::Idle,
        target: None,
        haste: None,
        waypoint: 0,
        last_move: Vec2::ZERO,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::config::Roster;

    fn count(state: &GameState, kind: UnitKind) -> usize {
        state.units.values().filter(|u| u.kind == kind).count()
    }

    #[test]
    fn default_match_layout() {
        let state = new_match(&ArenaConfig::default()).unwrap();
        assert_eq!(state.tick, 0);
        assert_eq!(count(&state, UnitKind::Hero), 4);
        assert!(count(&state, UnitKind::Tower) >= 6);
        assert_eq!(count(&state, UnitKind::Nexus), 2);
        for u in state.units.values() {
            assert_eq!(u.hp, u.max_hp);
        }
        for h in state.heroes() {
            assert_eq!(h.pos, state.spawn(h.team));
        }
    }

    #[test]
    fn five_per_team_gives_ten_heroes() {
        let mut cfg = ArenaConfig::default();
        cfg.game.heroes_per_team = 5;
        cfg.game.roster = Roster::default();
        let state = new_match(&cfg).unwrap();
        assert_eq!(count(&state, UnitKind::Hero), 10);
        assert_eq!(state.hero_ids(Team::Blue).len(), 5);
    }

    #[test]
    fn wave_interval_zero_is_rejected() {
        let mut cfg = ArenaConfig::default();
        cfg.game.wave_interval = 0;
        let err = new_match(&cfg).unwrap_err();
        assert_eq!(err.to_string(), "wave_interval must be positive");
    }

    #[test]
    fn snapshot_serde_roundtrip_preserves_digest() {
        let state = new_match(&ArenaConfig::default()).unwrap();
        let json = serde_json::to_string(&state).unwrap();
        let back: GameState = serde_json::from_str(&json).unwrap();
        assert_eq!(back.digest(), state.digest());
    }
}
