//! One simulation tick.
//!
//! Phases run in a fixed order: command intake, (1) status expiry and timers,
//! (2) spell casts, (3) movement, (4) auto-attacks and tower targeting,
//! (5) minion AI and wave spawns, (6) deaths, kill credit, gold and xp,
//! (7) respawns, (8) win check. Inside a phase units are visited in ascending id
//! order, so simultaneous deaths resolve lowest id first.

use std::collections::BTreeMap;

use rand::Rng;

use super::credit::resolve_kill_credit;
use super::event::{CastTarget, Command, Event, EventKind, RejectReason};
use super::geometry::Vec2;
use super::spell::{SpellKind, SpellSlot, SpellSpec};
use super::state::{AggroMark, DamageMark, GameState};
use super::unit::{Attack, Lane, Order, StatusEffect, StatusKind, Team, Unit, UnitId, UnitKind};

/// Range slack for floating point when a unit stops exactly at its range edge.
const RANGE_EPS: f64 = 1e-6;

/// Advances `state` by one tick and returns the events produced during it.
///
/// A state whose match has already ended is left untouched and yields no events.
pub fn step(state: &mut GameState, commands: &BTreeMap<UnitId, Command>) -> Vec<Event> {
    let mut events = Vec::new();
    if state.ended {
        state.events_this_tick.clear();
        return events;
    }
    let casts = intake(state, commands, &mut events);
    expire_and_tick_timers(state);
    resolve_casts(state, &casts, &mut events);
    movement(state);
    attacks(state, &mut events);
    minion_ai_and_waves(state, &mut events);
    deaths(state, &mut events);
    respawns(state, &mut events);
    win_check(state, &mut events);
    state.tick += 1;
    state.events_this_tick = events.clone();
    events
}

struct QueuedCast {
    hero: UnitId,
    slot: SpellSlot,
    target: CastTarget,
    command: Command,
}

fn push(events: &mut Vec<Event>, tick: u64, kind: EventKind) {
    events.push(Event::new(tick, kind));
}

fn reject(events: &mut Vec<Event>, tick: u64, hero: UnitId, command: Command, reason: RejectReason) {
    push(events, tick, EventKind::CommandRejected { hero, command, reason });
}

/// A unit that can still act this tick.
fn active(u: &Unit) -> bool {
    u.alive && u.hp > 0.0
}

/// Whether `target` can currently take damage from `attacker_team`.
fn attackable(state: &GameState, attacker_team: Team, target: &Unit) -> bool {
    if !target.alive || target.team == attacker_team {
        return false;
    }
    if target.kind == UnitKind::Nexus {
        return nexus_vulnerable(state, target.team);
    }
    true
}

/// A nexus takes damage once at least one tower of its team has fallen.
pub fn nexus_vulnerable(state: &GameState, team: Team) -> bool {
    state
        .units
        .values()
        .any(|u| u.kind == UnitKind::Tower && u.team == team && !u.alive)
}

fn intake(state: &mut GameState, commands: &BTreeMap<UnitId, Command>, events: &mut Vec<Event>) -> Vec<QueuedCast> {
    let now = state.tick;
    let size = state.map.size;
    let mut casts = Vec::new();
    for (&hero, &command) in commands {
        push(events, now, EventKind::CommandIssued { hero, command });
        let Some(unit) = state.units.get(&hero) else {
            reject(events, now, hero, command, RejectReason::UnknownUnit);
            continue;
        };
        if !unit.is_hero() {
            reject(events, now, hero, command, RejectReason::NotAHero);
            continue;
        }
        if !unit.alive {
            reject(events, now, hero, command, RejectReason::Dead);
            continue;
        }
        let team = unit.team;
        match command {
            Command::MoveTo { pos } => {
                if !pos.is_finite() {
                    reject(events, now, hero, command, RejectReason::InvalidPosition);
                    continue;
                }
                let u = state.units.get_mut(&hero).expect("checked");
                u.order = Order::MoveTo { pos: pos.clamp_to(size) };
                u.target = None;
            }
            Command::Attack { target } => {
                let valid = state
                    .units
                    .get(&target)
                    .is_some_and(|t| attackable(state, team, t));
                if !valid {
                    reject(events, now, hero, command, RejectReason::InvalidTarget);
                    continue;
                }
                let u = state.units.get_mut(&hero).expect("checked");
                u.order = Order::Attack { target };
            }
            Command::Cast { slot, target } => casts.push(QueuedCast { hero, slot, target, command }),
            Command::Ping { pos, kind } => {
                if !pos.is_finite() {
                    reject(events, now, hero, command, RejectReason::InvalidPosition);
                    continue;
                }
                push(events, now, EventKind::Ping {
                    pos: pos.clamp_to(size),
                    kind,
                    author: Some(hero),
                });
            }
            Command::Idle => {
                let u = state.units.get_mut(&hero).expect("checked");
                u.order = Order::Idle;
                u.target = None;
            }
        }
    }
    casts
}

fn expire_and_tick_timers(state: &mut GameState) {
    let now = state.tick;
    let regen = state.config.mana_regen;
    let fountain = state.config.fountain.clone();
    let spawns = [(Team::Blue, state.spawn(Team::Blue)), (Team::Red, state.spawn(Team::Red))];
    for u in state.units.values_mut() {
        u.statuses.retain(|s| s.expires_at > now);
        u.attack.remaining = u.attack.remaining.saturating_sub(1);
        for sp in &mut u.spells {
            sp.cooldown_remaining = sp.cooldown_remaining.saturating_sub(1);
        }
        if u.is_hero() && u.alive {
            u.mana = (u.mana + regen).min(u.max_mana);
            let spawn = spawns.iter().find(|(t, _)| *t == u.team).map(|(_, p)| *p).unwrap();
            if u.pos.distance(spawn) <= fountain.radius {
                u.heal(u.max_hp * fountain.regen_frac);
                u.mana = (u.mana + u.max_mana * fountain.regen_frac).min(u.max_mana);
            }
        }
    }
}

fn spell_spec<'a>(state: &'a GameState, caster: &Unit, slot: SpellSlot) -> Option<&'a SpellSpec> {
    let kit = state.config.kits.get(caster.kit.as_deref()?)?;
    kit.spells.iter().find(|s| s.slot == slot)
}

fn resolve_casts(state: &mut GameState, casts: &[QueuedCast], events: &mut Vec<Event>) {
    let now = state.tick;
    for cast in casts {
        if let Err(reason) = try_cast(state, cast, events) {
            reject(events, now, cast.hero, cast.command, reason);
        }
    }
}

fn try_cast(state: &mut GameState, cast: &QueuedCast, events: &mut Vec<Event>) -> Result<(), RejectReason> {
    let now = state.tick;
    let caster = state.units.get(&cast.hero).ok_or(RejectReason::UnknownUnit)?;
    if !active(caster) {
        return Err(RejectReason::Dead);
    }
    if caster.is_silenced() {
        return Err(RejectReason::Silenced);
    }
    let spec = spell_spec(state, caster, cast.slot).ok_or(RejectReason::NotLearned)?.clone();
    let spell = caster.spell(cast.slot).ok_or(RejectReason::NotLearned)?;
    if spell.rank == 0 {
        return Err(RejectReason::NotLearned);
    }
    if spell.cooldown_remaining > 0 {
        return Err(RejectReason::OnCooldown);
    }
    if caster.mana < spec.mana_cost {
        return Err(RejectReason::NoMana);
    }
    let rank = spell.rank;
    let team = caster.team;
    let origin = caster.pos;
    let magnitude = spec.magnitude_at(rank);

    let point_of = |state: &GameState, target: CastTarget| -> Result<Vec2, RejectReason> {
        match target {
            CastTarget::Point(p) if p.is_finite() => Ok(p),
            CastTarget::Point(_) => Err(RejectReason::InvalidPosition),
            CastTarget::Unit(id) => state
                .units
                .get(&id)
                .filter(|u| u.alive)
                .map(|u| u.pos)
                .ok_or(RejectReason::InvalidTarget),
            CastTarget::Caster => Err(RejectReason::InvalidTarget),
        }
    };

    let affected: Vec<UnitId> = match spec.kind {
        SpellKind::AoeDamageSlow | SpellKind::AoeSilenceRoot => {
            let center = point_of(state, cast.target)?;
            if origin.distance(center) > spec.range + RANGE_EPS {
                return Err(RejectReason::OutOfRange);
            }
            let hit: Vec<UnitId> = state
                .units
                .values()
                .filter(|u| {
                    u.alive
                        && u.team != team
                        && matches!(u.kind, UnitKind::Hero | UnitKind::Minion)
                        && u.pos.distance(center) <= spec.radius
                })
                .map(|u| u.id)
                .collect();
            let expires_at = now + spec.status_duration as u64;
            for &id in &hit {
                if spec.kind == SpellKind::AoeDamageSlow {
                    if magnitude > 0.0 {
                        deal_damage(state, cast.hero, id, magnitude, events);
                    }
                    add_status(state, id, StatusKind::Slow(spec.status_pct), expires_at);
                } else {
                    add_status(state, id, StatusKind::Silence, expires_at);
                    add_status(state, id, StatusKind::Root, expires_at);
                }
            }
            hit
        }
        SpellKind::SingleTargetHeal => {
            let CastTarget::Unit(target) = cast.target else {
                return Err(RejectReason::InvalidTarget);
            };
            let t = state.units.get(&target).ok_or(RejectReason::InvalidTarget)?;
            if target == cast.hero || !t.is_hero() || !t.alive || t.team != team {
                return Err(RejectReason::InvalidTarget);
            }
            if origin.distance(t.pos) > spec.range + RANGE_EPS {
                return Err(RejectReason::OutOfRange);
            }
            heal(state, cast.hero, target, magnitude, events);
            vec![target]
        }
        SpellKind::GlobalTeamHeal => {
            let allies: Vec<UnitId> = state.team_heroes(team).filter(|u| u.alive).map(|u| u.id).collect();
            for &id in &allies {
                heal(state, cast.hero, id, magnitude, events);
            }
            allies
        }
    };

    let caster = state.units.get_mut(&cast.hero).expect("caster exists");
    caster.mana -= spec.mana_cost;
    if let Some(sp) = caster.spell_mut(cast.slot) {
        sp.cooldown_remaining = spec.cooldown;
    }
    push(events, now, EventKind::SpellCast {
        caster: cast.hero,
        slot: cast.slot,
        target: cast.target,
        affected,
    });
    Ok(())
}

fn add_status(state: &mut GameState, id: UnitId, kind: StatusKind, expires_at: u64) {
    if let Some(u) = state.units.get_mut(&id) {
        u.statuses.push(StatusEffect { kind, expires_at });
    }
}

fn heal(state: &mut GameState, src: UnitId, dst: UnitId, amount: f64, events: &mut Vec<Event>) {
    let now = state.tick;
    if let Some(u) = state.units.get_mut(&dst) {
        let restored = u.heal(amount);
        push(events, now, EventKind::Heal { src, dst, amount: restored });
    }
}

/// Applies damage and records it for kill credit, assists and tower aggro.
fn deal_damage(state: &mut GameState, src: UnitId, dst: UnitId, amount: f64, events: &mut Vec<Event>) {
    let now = state.tick;
    let Some(victim) = state.units.get_mut(&dst) else {
        return;
    };
    let dealt = victim.take_damage(amount);
    let (victim_team, victim_pos, victim_hero) = (victim.team, victim.pos, victim.is_hero());
    push(events, now, EventKind::Damage { src, dst, amount: dealt });
    state
        .recent_damage
        .entry(dst)
        .or_default()
        .push(DamageMark { attacker: src, tick: now });
    let src_hero = state.units.get(&src).is_some_and(|u| u.is_hero());
    if src_hero && victim_hero {
        let towers: Vec<UnitId> = state
            .units
            .values()
            .filter(|t| {
                t.kind == UnitKind::Tower
                    && t.alive
                    && t.team == victim_team
                    && t.pos.distance(victim_pos) <= t.attack.range
            })
            .map(|t| t.id)
            .collect();
        for tower in towers {
            state.aggro.push(AggroMark { tower, hero: src, tick: now });
        }
    }
}

/// Movement speed for `unit` heading along `dir`, including statuses and haste.
pub fn effective_speed(state: &GameState, unit: &Unit, dir: Vec2) -> f64 {
    let base = unit.status_speed();
    match unit.haste {
        Some(h) if heading_toward_injured_ally(state, unit, dir, h.trigger) => base * (1.0 + h.boost_pct / 100.0),
        _ => base,
    }
}

/// True when `dir` points within 90 degrees of a living allied hero below `trigger` hp fraction.
pub fn heading_toward_injured_ally(state: &GameState, unit: &Unit, dir: Vec2, trigger: f64) -> bool {
    let Some(dir) = dir.normalized() else {
        return false;
    };
    state.team_heroes(unit.team).any(|ally| {
        ally.id != unit.id && ally.alive && ally.hp_frac() < trigger && (ally.pos - unit.pos).dot(dir) > 0.0
    })
}

/// Lane waypoints oriented from `team`'s end toward the enemy base.
fn oriented_lane(state: &GameState, lane: Lane, team: Team) -> Vec<Vec2> {
    let mut path = state.map.lane(lane).to_vec();
    if team == Team::Red {
        path.reverse();
    }
    path
}

fn movement(state: &mut GameState) {
    let ids: Vec<UnitId> = state.units.keys().copied().collect();
    let size = state.map.size;
    for id in ids {
        let unit = &state.units[&id];
        unit_move(state, unit.clone(), size);
    }
}

fn approach(from: Vec2, target: Vec2, range: f64) -> Option<Vec2> {
    let dist = from.distance(target);
    if dist <= range + RANGE_EPS {
        None
    } else {
        Some(from.step_toward(target, dist - range))
    }
}

fn unit_move(state: &mut GameState, unit: Unit, size: f64) {
    let id = unit.id;
    if !active(&unit) || unit.kind.is_structure() {
        state.units.get_mut(&id).expect("exists").last_move = Vec2::ZERO;
        return;
    }
    let mut next_order = unit.order;
    let mut next_waypoint = unit.waypoint;
    // destination for this tick, if the unit wants to move
    let dest: Option<Vec2> = match unit.kind {
        UnitKind::Hero => match unit.order {
            Order::Idle => None,
            Order::MoveTo { pos } => Some(pos),
            Order::Attack { target } => match state.units.get(&target) {
                Some(t) if attackable(state, unit.team, t) => approach(unit.pos, t.pos, unit.attack.range),
                _ => {
                    next_order = Order::Idle;
                    None
                }
            },
        },
        UnitKind::Minion => {
            let chase = unit
                .target
                .and_then(|t| state.units.get(&t))
                .filter(|t| attackable(state, unit.team, t));
            match chase {
                Some(t) => approach(unit.pos, t.pos, unit.attack.range),
                None => unit.lane.map(|lane| {
                    let path = oriented_lane(state, lane, unit.team);
                    let mut idx = unit.waypoint.min(path.len() - 1);
                    if unit.pos.distance(path[idx]) < 1e-6 && idx + 1 < path.len() {
                        idx += 1;
                    }
                    next_waypoint = idx;
                    path[idx]
                }),
            }
        }
        UnitKind::Tower | UnitKind::Nexus => None,
    };
    let mut new_pos = unit.pos;
    if let Some(dest) = dest {
        let speed = effective_speed(state, &unit, dest - unit.pos);
        new_pos = unit.pos.step_toward(dest, speed).clamp_to(size);
        if let Order::MoveTo { pos } = unit.order {
            if new_pos.distance(pos) < 1e-9 {
                next_order = Order::Idle;
            }
        }
    }
    let u = state.units.get_mut(&id).expect("exists");
    u.last_move = new_pos - u.pos;
    u.pos = new_pos;
    u.order = next_order;
    u.waypoint = next_waypoint;
}

/// Target a tower fires at this tick.
///
/// Enemy heroes that hit an allied hero inside tower range during the aggro window
/// come first (most recent hit, then lowest id). Otherwise the nearest enemy minion,
/// and only when no minion is in range, the nearest enemy hero.
pub fn tower_target(state: &GameState, tower: UnitId) -> Option<UnitId> {
    let t = state.unit(tower).filter(|t| t.kind == UnitKind::Tower && active(t))?;
    let window = state.config.aggro_window;
    let in_range: Vec<&Unit> = state
        .living()
        .filter(|u| {
            active(u)
                && u.team != t.team
                && matches!(u.kind, UnitKind::Hero | UnitKind::Minion)
                && u.pos.distance(t.pos) <= t.attack.range
        })
        .collect();
    let aggro = in_range
        .iter()
        .filter(|u| u.is_hero())
        .filter_map(|u| {
            state
                .aggro
                .iter()
                .filter(|m| m.tower == tower && m.hero == u.id && state.tick.saturating_sub(m.tick) <= window)
                .map(|m| m.tick)
                .max()
                .map(|tick| (tick, u.id))
        })
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    if let Some((_, hero)) = aggro {
        return Some(hero);
    }
    let nearest = |kind: UnitKind| {
        in_range
            .iter()
            .filter(|u| u.kind == kind)
            .min_by(|a, b| {
                a.pos
                    .distance(t.pos)
                    .total_cmp(&b.pos.distance(t.pos))
                    .then(a.id.cmp(&b.id))
            })
            .map(|u| u.id)
    };
    nearest(UnitKind::Minion).or_else(|| nearest(UnitKind::Hero))
}

fn attacks(state: &mut GameState, events: &mut Vec<Event>) {
    let ids: Vec<UnitId> = state.units.keys().copied().collect();
    for &id in &ids {
        if state.units[&id].kind == UnitKind::Tower {
            let target = tower_target(state, id);
            state.units.get_mut(&id).expect("exists").target = target;
        }
    }
    for id in ids {
        let unit = &state.units[&id];
        if !active(unit) || unit.kind == UnitKind::Nexus {
            continue;
        }
        let target = match unit.kind {
            UnitKind::Hero => match unit.order {
                Order::Attack { target } => Some(target),
                _ => None,
            },
            _ => unit.target,
        };
        let Some(target) = target else {
            continue;
        };
        let Some(victim) = state.units.get(&target) else {
            continue;
        };
        let in_range = unit.pos.distance(victim.pos) <= unit.attack.range + RANGE_EPS;
        if !attackable(state, unit.team, victim) || !in_range {
            continue;
        }
        if unit.is_hero() {
            state.units.get_mut(&id).expect("exists").target = Some(target);
        }
        if state.units[&id].attack.remaining > 0 {
            continue;
        }
        let Attack { damage, cooldown, .. } = state.units[&id].attack;
        state.units.get_mut(&id).expect("exists").attack.remaining = cooldown;
        deal_damage(state, id, target, damage, events);
    }
}

fn minion_ai_and_waves(state: &mut GameState, events: &mut Vec<Event>) {
    let radius = state.config.minion.aggro_radius;
    let minions: Vec<UnitId> = state
        .units
        .values()
        .filter(|u| u.kind == UnitKind::Minion && active(u))
        .map(|u| u.id)
        .collect();
    for id in minions {
        let me = &state.units[&id];
        let candidates: Vec<&Unit> = state
            .living()
            .filter(|u| active(u) && attackable(state, me.team, u) && u.pos.distance(me.pos) <= radius)
            .collect();
        let rank = |u: &Unit| match u.kind {
            UnitKind::Minion => 0,
            UnitKind::Tower | UnitKind::Nexus => 1,
            UnitKind::Hero => 2,
        };
        let target = candidates
            .iter()
            .min_by(|a, b| {
                rank(a)
                    .cmp(&rank(b))
                    .then(a.pos.distance(me.pos).total_cmp(&b.pos.distance(me.pos)))
                    .then(a.id.cmp(&b.id))
            })
            .map(|u| u.id);
        state.units.get_mut(&id).expect("exists").target = target;
    }

    let now = state.tick;
    if now == 0 || !now.is_multiple_of(state.config.wave_interval) {
        return;
    }
    let comp = state.config.wave_composition.clone();
    let melee = state.config.minion.melee.clone();
    let ranged = state.config.minion.ranged.clone();
    let size = state.map.size;
    let mut spawned = Vec::new();
    for team in [Team::Blue, Team::Red] {
        for lane in Lane::ALL {
            let start = state.map.lane_start(lane, team);
            let stats = std::iter::repeat_n(&melee, comp.melee as usize).chain(std::iter::repeat_n(&ranged, comp.ranged as usize));
            for s in stats {
                let jitter = Vec2::new(state.rng.random_range(-3.0..=3.0), state.rng.random_range(-3.0..=3.0));
                let id = state.alloc_id();
                let minion = Unit {
                    id,
                    kind: UnitKind::Minion,
                    team,
                    pos: (start + jitter).clamp_to(size),
                    hp: s.max_hp,
                    max_hp: s.max_hp,
                    mana: 0.0,
                    max_mana: 0.0,
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
                    lane: Some(lane),
                    kit: None,
                    spells: Vec::new(),
                    order: Order::Idle,
                    target: None,
                    haste: None,
                    waypoint: 1,
                    last_move: Vec2::ZERO,
                };
                state.units.insert(id, minion);
                spawned.push(id);
            }
        }
    }
    push(events, now, EventKind::WaveSpawned { minions: spawned });
}

fn grant(state: &mut GameState, hero: UnitId, gold: u32, xp: u32) {
    if let Some(h) = state.units.get_mut(&hero).filter(|h| h.is_hero()) {
        h.gold += gold;
        h.xp += xp;
    }
}

fn deaths(state: &mut GameState, events: &mut Vec<Event>) {
    let now = state.tick;
    let rewards = state.config.rewards.clone();
    let dying: Vec<UnitId> = state
        .units
        .values()
        .filter(|u| u.alive && u.hp <= 0.0)
        .map(|u| u.id)
        .collect();
    let mut removed = Vec::new();
    for id in dying {
        let credit = resolve_kill_credit(state, id);
        let victim = state.units[&id].clone();
        let hero_killer = credit
            .killer
            .filter(|k| state.units.get(k).is_some_and(|u| u.is_hero() && u.team != victim.team));
        match victim.kind {
            UnitKind::Hero => {
                let respawn = now + state.config.respawn_base + state.config.respawn_per_level * (victim.level as u64 - 1);
                let u = state.units.get_mut(&id).expect("exists");
                u.alive = false;
                u.respawn_at = Some(respawn);
                u.order = Order::Idle;
                u.target = None;
                u.statuses.clear();
                if let Some(k) = hero_killer {
                    grant(state, k, rewards.hero_kill_gold, rewards.hero_kill_xp);
                }
                for &a in &credit.assists {
                    grant(state, a, rewards.assist_gold, rewards.assist_xp);
                }
                push(events, now, EventKind::Kill {
                    killer: credit.killer,
                    victim: id,
                    assists: credit.assists.clone(),
                });
            }
            UnitKind::Minion => {
                state.units.get_mut(&id).expect("exists").alive = false;
                if let Some(k) = hero_killer {
                    grant(state, k, rewards.last_hit_gold, 0);
                }
                let sharers: Vec<UnitId> = state
                    .team_heroes(victim.team.opponent())
                    .filter(|h| h.alive && h.pos.distance(victim.pos) <= rewards.xp_share_radius)
                    .map(|h| h.id)
                    .collect();
                for h in sharers {
                    grant(state, h, 0, rewards.minion_xp);
                }
                push(events, now, EventKind::MinionDied { victim: id, killer: credit.killer });
                removed.push(id);
            }
            UnitKind::Tower => {
                let u = state.units.get_mut(&id).expect("exists");
                u.alive = false;
                u.target = None;
                for h in state.hero_ids(victim.team.opponent()) {
                    grant(state, h, rewards.tower_gold, rewards.tower_xp);
                }
                push(events, now, EventKind::TowerDestroyed { id, killer: credit.killer });
            }
            UnitKind::Nexus => {
                state.units.get_mut(&id).expect("exists").alive = false;
                push(events, now, EventKind::NexusDestroyed { id });
            }
        }
        state.recent_damage.remove(&id);
    }
    for id in removed {
        state.units.remove(&id);
    }
    level_ups(state, events);

    let window = state.config.assist_window;
    for marks in state.recent_damage.values_mut() {
        marks.retain(|m| now.saturating_sub(m.tick) <= window);
    }
    state.recent_damage.retain(|_, marks| !marks.is_empty());
    let aggro_window = state.config.aggro_window;
    state.aggro.retain(|m| now.saturating_sub(m.tick) <= aggro_window);
}

fn level_ups(state: &mut GameState, events: &mut Vec<Event>) {
    let now = state.tick;
    let config = state.config.clone();
    for u in state.units.values_mut().filter(|u| u.is_hero()) {
        let target = config.level_for_xp(u.xp);
        let Some(kit) = u.kit.as_deref().and_then(|k| config.kits.get(k)) else {
            continue;
        };
        while u.level < target {
            u.level += 1;
            u.max_hp += kit.stats.hp_per_level;
            if u.alive {
                u.hp += kit.stats.hp_per_level;
            }
            u.attack.damage += kit.stats.damage_per_level;
            if let Some(slot) = kit.skill_order.get(u.level as usize - 1) {
                let cap = kit.spells.iter().find(|s| s.slot == *slot).map_or(0, |s| s.max_rank);
                if let Some(sp) = u.spell_mut(*slot) {
                    if sp.rank < cap {
                        sp.rank += 1;
                    }
                }
            }
            events.push(Event::new(now, EventKind::LevelUp { hero: u.id, level: u.level }));
        }
    }
}

fn respawns(state: &mut GameState, events: &mut Vec<Event>) {
    let now = state.tick;
    let spawns = [(Team::Blue, state.spawn(Team::Blue)), (Team::Red, state.spawn(Team::Red))];
    for u in state.units.values_mut() {
        if u.is_hero() && !u.alive && u.respawn_at.is_some_and(|t| t <= now) {
            u.alive = true;
            u.respawn_at = None;
            u.hp = u.max_hp;
            u.mana = u.max_mana;
            u.pos = spawns.iter().find(|(t, _)| *t == u.team).map(|(_, p)| *p).unwrap();
            u.statuses.clear();
            u.order = Order::Idle;
            u.target = None;
            events.push(Event::new(now, EventKind::Respawn { hero: u.id }));
        }
    }
}

fn win_check(state: &mut GameState, events: &mut Vec<Event>) {
    let now = state.tick;
    let fallen = |team: Team| {
        state
            .units
            .values()
            .any(|u| u.kind == UnitKind::Nexus && u.team == team && !u.alive)
    };
    let (blue_lost, red_lost) = (fallen(Team::Blue), fallen(Team::Red));
    let winner = if blue_lost || red_lost {
        match (blue_lost, red_lost) {
            (true, false) => Some(Team::Red),
            (false, true) => Some(Team::Blue),
            _ => None,
        }
    } else if now + 1 >= state.config.max_ticks {
        let towers = |team: Team| {
            state
                .units
                .values()
                .filter(|u| u.kind == UnitKind::Tower && u.team == team && u.alive)
                .count()
        };
        match towers(Team::Blue).cmp(&towers(Team::Red)) {
            std::cmp::Ordering::Greater => Some(Team::Blue),
            std::cmp::Ordering::Less => Some(Team::Red),
            std::cmp::Ordering::Equal => None,
        }
    } else {
        return;
    };
    state.ended = true;
    state.winner = winner;
    events.push(Event::new(now, EventKind::MatchEnd { winner }));
}
