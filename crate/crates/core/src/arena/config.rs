use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::geometry::Vec2;
use super::spell::{SpellKind, SpellSlot, SpellSpec};
use super::unit::{Lane, Team};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{field} {reason}")]
    Invalid { field: String, reason: String },
    #[error("config parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitStats {
    pub max_hp: f64,
    #[serde(default)]
    pub hp_per_level: f64,
    #[serde(default)]
    pub max_mana: f64,
    pub move_speed: f64,
    pub attack_range: f64,
    pub attack_damage: f64,
    #[serde(default)]
    pub damage_per_level: f64,
    pub attack_cooldown: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeroKit {
    pub stats: UnitStats,
    pub spells: Vec<SpellSpec>,
    /// Spell ranked up on reaching level `i + 1`.
    pub skill_order: Vec<SpellSlot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeroSlot {
    pub kit: String,
    pub lane: Option<Lane>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Roster {
    #[serde(default)]
    pub blue: Vec<HeroSlot>,
    #[serde(default)]
    pub red: Vec<HeroSlot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveComposition {
    pub melee: u32,
    pub ranged: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinionStats {
    pub melee: UnitStats,
    pub ranged: UnitStats,
    pub aggro_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerStats {
    pub max_hp: f64,
    pub range: f64,
    pub damage: f64,
    pub cooldown: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardTable {
    pub last_hit_gold: u32,
    pub minion_xp: u32,
    pub xp_share_radius: f64,
    pub hero_kill_gold: u32,
    pub hero_kill_xp: u32,
    pub assist_gold: u32,
    pub assist_xp: u32,
    pub tower_gold: u32,
    pub tower_xp: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fountain {
    pub radius: f64,
    /// Fraction of max hp and mana restored per tick inside the fountain.
    pub regen_frac: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub tick_rate: u32,
    pub wave_interval: u64,
    pub wave_composition: WaveComposition,
    pub heroes_per_team: u32,
    pub assist_window: u64,
    pub aggro_window: u64,
    pub respawn_base: u64,
    pub respawn_per_level: u64,
    pub rewards: RewardTable,
    /// Total xp needed for each level; entry `i` unlocks level `i + 1`.
    pub xp_table: Vec<u32>,
    pub max_ticks: u64,
    pub rng_seed: u64,
    pub mana_regen: f64,
    pub fountain: Fountain,
    pub minion: MinionStats,
    pub tower: TowerStats,
    pub kits: BTreeMap<String, HeroKit>,
    #[serde(default)]
    pub roster: Roster,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerPlacement {
    pub team: Team,
    pub lane: Lane,
    pub pos: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NexusPlacement {
    pub team: Team,
    pub pos: Vec2,
    pub hp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub size: f64,
    /// Waypoints per lane, ordered from the Blue end to the Red end.
    pub lanes: BTreeMap<Lane, Vec<Vec2>>,
    pub towers: Vec<TowerPlacement>,
    pub nexus: Vec<NexusPlacement>,
    pub spawn_points: BTreeMap<Team, Vec2>,
}

impl MapSpec {
    pub fn spawn(&self, team: Team) -> Vec2 {
        self.spawn_points[&team]
    }

    pub fn lane(&self, lane: Lane) -> &[Vec2] {
        &self.lanes[&lane]
    }

    /// First waypoint a team's minions walk from.
    pub fn lane_start(&self, lane: Lane, team: Team) -> Vec2 {
        let path = self.lane(lane);
        match team {
            Team::Blue => path[0],
            Team::Red => path[path.len() - 1],
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.size.is_finite() && self.size > 0.0) {
            return Err(ConfigError::invalid("map.size", "must be positive"));
        }
        if self.lanes.len() != 3 || Lane::ALL.iter().any(|l| !self.lanes.contains_key(l)) {
            return Err(ConfigError::invalid("map.lanes", "must define exactly Top, Mid and Bot"));
        }
        for team in [Team::Blue, Team::Red] {
            let Some(spawn) = self.spawn_points.get(&team) else {
                return Err(ConfigError::invalid("map.spawn_points", format!("missing {team:?}")));
            };
            if !spawn.in_bounds(self.size) {
                return Err(ConfigError::invalid("map.spawn_points", "must lie inside the map"));
            }
        }
        let blue = self.spawn(Team::Blue);
        let red = self.spawn(Team::Red);
        for (lane, path) in &self.lanes {
            let field = format!("map.lanes.{lane:?}");
            if path.len() < 2 {
                return Err(ConfigError::invalid(field, "needs at least two waypoints"));
            }
            if path.iter().any(|p| !p.is_finite() || !p.in_bounds(self.size)) {
                return Err(ConfigError::invalid(field, "waypoints must lie inside the map"));
            }
            if path[0].distance(blue) >= path[0].distance(red) {
                return Err(ConfigError::invalid(field, "first waypoint must be at the Blue end"));
            }
        }
        for team in [Team::Blue, Team::Red] {
            for lane in Lane::ALL {
                if !self.towers.iter().any(|t| t.team == team && t.lane == lane) {
                    return Err(ConfigError::invalid(
                        "map.towers",
                        format!("{team:?} has no tower in {lane:?}"),
                    ));
                }
            }
            let count = self.nexus.iter().filter(|n| n.team == team).count();
            if count != 1 {
                return Err(ConfigError::invalid("map.nexus", format!("{team:?} needs exactly one nexus")));
            }
        }
        if self.towers.iter().any(|t| !t.pos.in_bounds(self.size))
            || self.nexus.iter().any(|n| !n.pos.in_bounds(self.size) || n.hp <= 0.0)
        {
            return Err(ConfigError::invalid("map", "structures must lie inside the map with positive hp"));
        }
        Ok(())
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("tick_rate", self.tick_rate as u64),
            ("wave_interval", self.wave_interval),
            ("assist_window", self.assist_window),
            ("aggro_window", self.aggro_window),
            ("respawn_base", self.respawn_base),
            ("max_ticks", self.max_ticks),
        ];
        for (field, v) in positive {
            if v == 0 {
                return Err(ConfigError::invalid(field, "must be positive"));
            }
        }
        if !(1..=5).contains(&self.heroes_per_team) {
            return Err(ConfigError::invalid("heroes_per_team", "must be between 1 and 5"));
        }
        if self.xp_table.is_empty() || self.xp_table[0] != 0 || self.xp_table.windows(2).any(|w| w[0] > w[1]) {
            return Err(ConfigError::invalid("xp_table", "must start at 0 and be nondecreasing"));
        }
        if self.tower.cooldown == 0 || self.tower.max_hp <= 0.0 {
            return Err(ConfigError::invalid("tower", "needs positive hp and cooldown"));
        }
        for (name, stats) in [("minion.melee", &self.minion.melee), ("minion.ranged", &self.minion.ranged)] {
            check_stats(name, stats)?;
        }
        for (name, kit) in &self.kits {
            check_stats(&format!("kits.{name}.stats"), &kit.stats)?;
            for spell in &kit.spells {
                let field = format!("kits.{name}.spells.{}", spell.slot);
                if spell.cooldown == 0 {
                    return Err(ConfigError::invalid(format!("{field}.cooldown"), "must be positive"));
                }
                if spell.magnitude < 0.0 || spell.max_rank == 0 {
                    return Err(ConfigError::invalid(field, "needs magnitude >= 0 and max_rank >= 1"));
                }
                let needs_pct = spell.kind == SpellKind::AoeDamageSlow;
                if needs_pct && !(spell.status_pct > 0.0 && spell.status_pct <= 100.0) {
                    return Err(ConfigError::invalid(format!("{field}.status_pct"), "must be in (0, 100]"));
                }
            }
        }
        for (side, slots) in [("roster.blue", &self.roster.blue), ("roster.red", &self.roster.red)] {
            if !slots.is_empty() && slots.len() != self.heroes_per_team as usize {
                return Err(ConfigError::invalid(side, "must be empty or list heroes_per_team slots"));
            }
            if let Some(slot) = slots.iter().find(|s| !self.kits.contains_key(&s.kit)) {
                return Err(ConfigError::invalid(side, format!("unknown kit {:?}", slot.kit)));
            }
        }
        if self.kits.is_empty() {
            return Err(ConfigError::invalid("kits", "must define at least one kit"));
        }
        Ok(())
    }

    /// Level reached with `xp` total experience.
    pub fn level_for_xp(&self, xp: u32) -> u32 {
        self.xp_table.iter().filter(|&&need| xp >= need).count().max(1) as u32
    }

    /// Hero slots for a team, falling back to a generated lineup when the roster is empty.
    pub fn slots(&self, team: Team) -> Vec<HeroSlot> {
        let listed = match team {
            Team::Blue => &self.roster.blue,
            Team::Red => &self.roster.red,
        };
        if !listed.is_empty() {
            return listed.clone();
        }
        // carry and support share the bottom lane, as in the shipped two-hero roster
        let first = self.kits.keys().next().cloned().unwrap_or_default();
        let pick = |name: &str| if self.kits.contains_key(name) { name.to_string() } else { first.clone() };
        const LANES: [Lane; 5] = [Lane::Bot, Lane::Bot, Lane::Mid, Lane::Top, Lane::Mid];
        (0..self.heroes_per_team as usize)
            .map(|i| HeroSlot {
                kit: pick(if i == 1 { "support" } else { "carry" }),
                lane: Some(LANES[i % LANES.len()]),
            })
            .collect()
    }
}

fn check_stats(field: &str, s: &UnitStats) -> Result<(), ConfigError> {
    if !(s.max_hp > 0.0) || s.attack_cooldown == 0 || s.move_speed < 0.0 || s.attack_range < 0.0 {
        return Err(ConfigError::invalid(field, "needs positive hp and attack cooldown"));
    }
    Ok(())
}

/// Canonical config file: rules plus map, one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArenaConfig {
    pub game: GameConfig,
    pub map: MapSpec,
}

impl ArenaConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ArenaConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.game.validate()?;
        self.map.validate()
    }

    /// Canonical bytes of the ruleset; the match seed is zeroed so that it does not
    /// change the identity of the rules.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut rules = self.clone();
        rules.game.rng_seed = 0;
        serde_json::to_vec(&rules).expect("config serializes")
    }

    /// Hex SHA-256 of [`ArenaConfig::canonical_bytes`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_bytes()))
    }
}

impl Default for ArenaConfig {
    fn default() -> Self {
        ArenaConfig {
            game: GameConfig::default(),
            map: MapSpec::default(),
        }
    }
}

fn spell(
    slot: SpellSlot,
    kind: SpellKind,
    range: f64,
    radius: f64,
    magnitude: f64,
    magnitude_per_rank: f64,
    status: (f64, u32),
    cooldown: u32,
    mana_cost: f64,
    max_rank: u32,
) -> SpellSpec {
    SpellSpec {
        slot,
        kind,
        range,
        radius,
        magnitude,
        magnitude_per_rank,
        status_pct: status.0,
        status_duration: status.1,
        cooldown,
        mana_cost,
        max_rank,
    }
}

impl Default for GameConfig {
    fn default() -> Self {
        use SpellSlot::*;
        let carry = HeroKit {
            stats: UnitStats {
                max_hp: 480.0,
                hp_per_level: 40.0,
                max_mana: 200.0,
                move_speed: 2.4,
                attack_range: 55.0,
                attack_damage: 24.0,
                damage_per_level: 3.0,
                attack_cooldown: 16,
            },
            spells: vec![spell(Q, SpellKind::AoeDamageSlow, 110.0, 30.0, 60.0, 30.0, (20.0, 30), 160, 40.0, 5)],
            skill_order: vec![Q; 10],
        };
        let support = HeroKit {
            stats: UnitStats {
                max_hp: 440.0,
                hp_per_level: 36.0,
                max_mana: 400.0,
                move_speed: 2.5,
                attack_range: 60.0,
                attack_damage: 16.0,
                damage_per_level: 2.0,
                attack_cooldown: 18,
            },
            spells: vec![
                spell(Q, SpellKind::AoeDamageSlow, 120.0, 40.0, 40.0, 20.0, (30.0, 40), 120, 50.0, 5),
                spell(W, SpellKind::SingleTargetHeal, 110.0, 0.0, 80.0, 30.0, (0.0, 0), 100, 40.0, 5),
                spell(E, SpellKind::AoeSilenceRoot, 120.0, 35.0, 0.0, 0.0, (0.0, 30), 240, 60.0, 5),
                spell(R, SpellKind::GlobalTeamHeal, 0.0, 0.0, 150.0, 75.0, (0.0, 0), 1200, 100.0, 3),
            ],
            skill_order: vec![W, Q, E, R, W, Q, W, R, W, Q],
        };
        GameConfig {
            tick_rate: 20,
            wave_interval: 300,
            wave_composition: WaveComposition { melee: 3, ranged: 2 },
            heroes_per_team: 2,
            assist_window: 200,
            aggro_window: 80,
            respawn_base: 160,
            respawn_per_level: 20,
            rewards: RewardTable {
                last_hit_gold: 20,
                minion_xp: 25,
                xp_share_radius: 150.0,
                hero_kill_gold: 300,
                hero_kill_xp: 160,
                assist_gold: 150,
                assist_xp: 80,
                tower_gold: 150,
                tower_xp: 100,
            },
            xp_table: vec![0, 120, 280, 480, 720, 1000, 1320, 1680, 2080, 2520],
            max_ticks: 6000,
            rng_seed: 0,
            mana_regen: 0.3,
            fountain: Fountain {
                radius: 60.0,
                regen_frac: 0.02,
            },
            minion: MinionStats {
                melee: UnitStats {
                    max_hp: 120.0,
                    hp_per_level: 0.0,
                    max_mana: 0.0,
                    move_speed: 1.6,
                    attack_range: 12.0,
                    attack_damage: 8.0,
                    damage_per_level: 0.0,
                    attack_cooldown: 20,
                },
                ranged: UnitStats {
                    max_hp: 80.0,
                    hp_per_level: 0.0,
                    max_mana: 0.0,
                    move_speed: 1.6,
                    attack_range: 50.0,
                    attack_damage: 10.0,
                    damage_per_level: 0.0,
                    attack_cooldown: 25,
                },
                aggro_radius: 70.0,
            },
            tower: TowerStats {
                max_hp: 1500.0,
                range: 70.0,
                damage: 60.0,
                cooldown: 20,
            },
            kits: BTreeMap::from([("carry".to_string(), carry), ("support".to_string(), support)]),
            roster: Roster {
                blue: vec![
                    HeroSlot { kit: "carry".into(), lane: Some(Lane::Bot) },
                    HeroSlot { kit: "support".into(), lane: Some(Lane::Bot) },
                ],
                red: vec![
                    HeroSlot { kit: "carry".into(), lane: Some(Lane::Bot) },
                    HeroSlot { kit: "support".into(), lane: Some(Lane::Bot) },
                ],
            },
        }
    }
}

impl Default for MapSpec {
    fn default() -> Self {
        let v = Vec2::new;
        MapSpec {
            size: 600.0,
            lanes: BTreeMap::from([
                (Lane::Top, vec![v(50.0, 550.0), v(50.0, 50.0), v(550.0, 50.0)]),
                (Lane::Mid, vec![v(50.0, 550.0), v(550.0, 50.0)]),
                (Lane::Bot, vec![v(50.0, 550.0), v(550.0, 550.0), v(550.0, 50.0)]),
            ]),
            towers: vec![
                TowerPlacement { team: Team::Blue, lane: Lane::Top, pos: v(50.0, 300.0) },
                TowerPlacement { team: Team::Blue, lane: Lane::Mid, pos: v(200.0, 400.0) },
                TowerPlacement { team: Team::Blue, lane: Lane::Bot, pos: v(300.0, 550.0) },
                TowerPlacement { team: Team::Red, lane: Lane::Top, pos: v(300.0, 50.0) },
                TowerPlacement { team: Team::Red, lane: Lane::Mid, pos: v(400.0, 200.0) },
                TowerPlacement { team: Team::Red, lane: Lane::Bot, pos: v(550.0, 300.0) },
            ],
            nexus: vec![
                NexusPlacement { team: Team::Blue, pos: v(50.0, 550.0), hp: 2000.0 },
                NexusPlacement { team: Team::Red, pos: v(550.0, 50.0), hp: 2000.0 },
            ],
            spawn_points: BTreeMap::from([(Team::Blue, v(25.0, 575.0)), (Team::Red, v(575.0, 25.0))]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ArenaConfig::default().validate().unwrap();
    }

    #[test]
    fn zero_wave_interval_names_the_field() {
        let mut cfg = ArenaConfig::default();
        cfg.game.wave_interval = 0;
        assert_eq!(cfg.validate().unwrap_err().to_string(), "wave_interval must be positive");
    }

    #[test]
    fn zero_heroes_rejected() {
        let mut cfg = ArenaConfig::default();
        cfg.game.heroes_per_team = 0;
        cfg.game.roster = Roster::default();
        assert!(cfg.validate().unwrap_err().to_string().starts_with("heroes_per_team"));
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut value = serde_json::to_value(ArenaConfig::default()).unwrap();
        value["game"]["fog_of_war"] = serde_json::json!(true);
        let err = ArenaConfig::from_json(&value.to_string()).unwrap_err();
        assert!(err.to_string().contains("fog_of_war"), "{err}");
    }

    #[test]
    fn seed_does_not_change_ruleset_hash() {
        let a = ArenaConfig::default();
        let mut b = a.clone();
        b.game.rng_seed = 99;
        assert_eq!(a.hash(), b.hash());
        b.game.assist_window += 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn level_table_lookup() {
        let cfg = GameConfig::default();
        assert_eq!(cfg.level_for_xp(0), 1);
        assert_eq!(cfg.level_for_xp(119), 1);
        assert_eq!(cfg.level_for_xp(120), 2);
        assert_eq!(cfg.level_for_xp(100_000), 10);
    }

    #[test]
    fn generated_roster_fills_five_slots() {
        let mut cfg = GameConfig::default();
        cfg.roster = Roster::default();
        cfg.heroes_per_team = 5;
        let slots = cfg.slots(Team::Red);
        assert_eq!(slots.len(), 5);
        assert_eq!(slots.iter().filter(|s| s.kit == "support").count(), 1);
        cfg.heroes_per_team = 2;
        assert_eq!(cfg.slots(Team::Blue), GameConfig::default().roster.blue);
    }
}
