//! Browser bindings for three small views of the tutor: a seeded match played
//! tick by tick, the follow-point geometry, and the KDA analytics.

use moba_tutor::analytics::{kda_factor, mean_stddev, Condition};
use moba_tutor::arena::{ArenaConfig, CommandSet, EventKind, Team, UnitKind, Vec2};
use moba_tutor::harness::{MatchSession, MatchSetup, NoviceControl};
use moba_tutor::tutor::{follow_point_at, TutorConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct UnitView {
    id: u32,
    kind: &'static str,
    blue: bool,
    x: f64,
    y: f64,
    hp: f64,
    alive: bool,
    role: &'static str,
}

#[derive(Serialize)]
struct TipView {
    tick: u64,
    rule: String,
    message: String,
}

#[derive(Serialize)]
struct Frame {
    tick: u64,
    ended: bool,
    winner: Option<&'static str>,
    units: Vec<UnitView>,
    tips: Vec<TipView>,
    novice_kda: [u32; 3],
}

/// A headless match the page advances and draws.
#[wasm_bindgen]
pub struct Playback {
    session: MatchSession,
    tips: Vec<TipView>,
    kda: [u32; 3],
}

impl Playback {
    pub fn create(seed: u64, condition: &str) -> Result<Playback, String> {
        let condition = condition.parse::<Condition>().map_err(|e| e.to_string())?;
        let setup = MatchSetup::new(ArenaConfig::default(), condition);
        let session = MatchSession::new(&setup, seed, NoviceControl::Scripted).map_err(|e| e.to_string())?;
        Ok(Playback { session, tips: Vec::new(), kda: [0; 3] })
    }

    pub fn advance(&mut self, ticks: u32) -> Result<(), String> {
        let none = CommandSet::new();
        let novice = self.session.roles.novice;
        for _ in 0..ticks {
            for e in self.session.tick(&none).map_err(|e| e.to_string())? {
                match e.kind {
                    EventKind::TipEmitted { tip } => self.tips.push(TipView { tick: tip.tick, rule: tip.rule, message: tip.message }),
                    EventKind::Kill { killer, victim, assists } => {
                        if killer == Some(novice) {
                            self.kda[0] += 1;
                        }
                        if victim == novice {
                            self.kda[1] += 1;
                        }
                        if assists.contains(&novice) {
                            self.kda[2] += 1;
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn frame(&mut self) -> String {
        let s = &self.session;
        let tutor = s.tutor.as_ref().map(|t| t.hero);
        let units = s
            .state
            .units
            .values()
            .map(|u| UnitView {
                id: u.id.0,
                kind: match u.kind {
                    UnitKind::Hero => "hero",
                    UnitKind::Minion => "minion",
                    UnitKind::Tower => "tower",
                    UnitKind::Nexus => "nexus",
                },
                blue: u.team == Team::Blue,
                x: u.pos.x,
                y: u.pos.y,
                hp: u.hp_frac(),
                alive: u.alive,
                role: if u.id == s.roles.novice {
                    "novice"
                } else if Some(u.id) == tutor {
                    "tutor"
                } else {
                    ""
                },
            })
            .collect();
        let frame = Frame {
            tick: s.state.tick,
            ended: s.state.ended,
            winner: s.state.winner.map(|t| if t == Team::Blue { "Blue" } else { "Red" }),
            units,
            tips: std::mem::take(&mut self.tips),
            novice_kda: self.kda,
        };
        serde_json::to_string(&frame).expect("frames serialize")
    }
}

#[wasm_bindgen]
impl Playback {
    /// Starts a match; `condition` is baseline, support_only or support_plus_tips.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, condition: &str) -> Result<Playback, JsError> {
        Playback::create(seed.into(), condition).map_err(|e| JsError::new(&e))
    }

    /// Simulates `ticks` more ticks (fewer if the match ends).
    pub fn step(&mut self, ticks: u32) -> Result<(), JsError> {
        self.advance(ticks).map_err(|e| JsError::new(&e))
    }

    /// JSON view of the current state plus tips emitted since the last call.
    pub fn snapshot(&mut self) -> String {
        self.frame()
    }

    #[wasm_bindgen(getter)]
    pub fn map_size(&self) -> f64 {
        self.session.state.map.size
    }
}

/// Where the tutor wants to stand for a given partner, tutor and spawn position,
/// with the default follow distance. Returns `[x, y]`.
#[wasm_bindgen]
pub fn follow_point(px: f64, py: f64, tx: f64, ty: f64, sx: f64, sy: f64) -> Vec<f64> {
    let cfg = TutorConfig::for_team_size(2);
    let size = ArenaConfig::default().map.size;
    let p = follow_point_at(Vec2::new(px, py), Vec2::new(tx, ty), Vec2::new(sx, sy), &cfg, size);
    vec![p.x, p.y]
}

#[wasm_bindgen]
pub fn follow_distance() -> f64 {
    TutorConfig::for_team_size(2).follow_distance
}

pub fn kda_value(kills: i32, deaths: i32, assists: i32) -> Result<f64, String> {
    kda_factor(kills.into(), deaths.into(), assists.into()).map_err(|e| e.to_string())
}

/// (kills + assists) / max(1, deaths).
#[wasm_bindgen]
pub fn kda(kills: i32, deaths: i32, assists: i32) -> Result<f64, JsError> {
    kda_value(kills, deaths, assists).map_err(|e| JsError::new(&e))
}

/// Mean and sample standard deviation of per-match lines `k/d/a`, one per line,
/// as JSON `{"kdas": [...], "mean": m, "stddev": s}`.
pub fn aggregate_lines(text: &str) -> Result<String, String> {
    let mut kdas = Vec::new();
    for (i, line) in text.lines().map(str::trim).enumerate().filter(|(_, l)| !l.is_empty()) {
        let parts: Vec<&str> = line.split('/').map(str::trim).collect();
        let nums: Result<Vec<i32>, _> = parts.iter().map(|p| p.parse::<i32>()).collect();
        match nums.ok().filter(|n| n.len() == 3) {
            Some(n) => kdas.push(kda_value(n[0], n[1], n[2]).map_err(|e| format!("line {}: {e}", i + 1))?),
            None => return Err(format!("line {}: expected kills/deaths/assists, got {line:?}", i + 1)),
        }
    }
    if kdas.is_empty() {
        return Err("no matches given".into());
    }
    let (mean, stddev) = mean_stddev(&kdas);
    Ok(serde_json::json!({ "kdas": kdas, "mean": mean, "stddev": stddev }).to_string())
}

#[wasm_bindgen]
pub fn aggregate(text: &str) -> Result<String, JsError> {
    aggregate_lines(text).map_err(|e| JsError::new(&e))
}
