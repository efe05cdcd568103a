use crate::arena::{heading_toward_injured_ally, GameState, Order, UnitId, Vec2};

use super::TutorConfig;

/// Where the tutor should stand: `follow_distance` from the partner along the
/// partner-to-tutor direction, or toward the tutor's spawn when the two coincide.
/// Never closer than `min_separation` to the partner.
pub fn follow_point_at(partner: Vec2, tutor: Vec2, spawn: Vec2, cfg: &TutorConfig, map_size: f64) -> Vec2 {
    let preferred = (tutor - partner)
        .normalized()
        .or_else(|| (spawn - partner).normalized())
        .unwrap_or(Vec2::new(0.0, 1.0));
    let candidate = |dir: Vec2| (partner + dir * cfg.follow_distance).clamp_to(map_size);
    let point = candidate(preferred);
    if point.distance(partner) >= cfg.min_separation {
        return point;
    }
    // Clamping against a map edge pulled the point in; try other bearings.
    let fallbacks = (spawn - partner).normalized().into_iter().chain((0..8).map(|i| {
        let a = std::f64::consts::FRAC_PI_4 * i as f64;
        Vec2::new(a.cos(), a.sin())
    }));
    fallbacks
        .map(candidate)
        .find(|p| p.distance(partner) >= cfg.min_separation)
        .unwrap_or(point)
}

/// Follow target for the tutor hero given the current state.
pub fn follow_point(state: &GameState, tutor: UnitId, partner: UnitId, cfg: &TutorConfig) -> Option<Vec2> {
    let me = state.unit(tutor)?;
    let p = state.unit(partner)?;
    if !p.alive {
        return Some(state.spawn(me.team));
    }
    Some(follow_point_at(p.pos, me.pos, state.spawn(me.team), cfg, state.map.size))
}

/// Direction the hero is currently moving in: toward its order's destination, or its
/// last displacement when idle.
pub fn heading(state: &GameState, hero: UnitId) -> Vec2 {
    let Some(u) = state.unit(hero) else {
        return Vec2::ZERO;
    };
    match u.order {
        Order::MoveTo { pos } => pos - u.pos,
        Order::Attack { target } => state.unit(target).map_or(Vec2::ZERO, |t| t.pos - u.pos),
        Order::Idle => u.last_move,
    }
}

/// Movement speed of `hero` with the injured-ally passive applied for its current heading.
pub fn passive_speed(state: &GameState, hero: UnitId, cfg: &TutorConfig) -> f64 {
    let Some(u) = state.unit(hero) else {
        return 0.0;
    };
    let base = u.status_speed();
    if heading_toward_injured_ally(state, u, heading(state, hero), cfg.passive_trigger) {
        base * (1.0 + cfg.passive_boost_pct / 100.0)
    } else {
        base
    }
}
