//! Wire messages for the `/match` WebSocket. Every frame is a JSON object with
//! `"v": 1` and a `"type"` tag.

use moba_tutor::arena::{
    ArenaConfig, Command, Event, GameState, Lane, PingKind, SpellState, StatusEffect, Team, Tick, Unit, UnitId, UnitKind,
    Vec2,
};
use moba_tutor::tips::TipEvent;
use serde::{Deserialize, Serialize};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Player,
    Spectator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Join { v: u32, role: Role },
    Command { v: u32, command: Command },
    Ping { v: u32, pos: Vec2, kind: PingKind },
}

impl ClientMessage {
    pub fn version(&self) -> u32 {
        match self {
            ClientMessage::Join { v, .. } | ClientMessage::Command { v, .. } | ClientMessage::Ping { v, .. } => *v,
        }
    }

    pub fn join(role: Role) -> Self {
        ClientMessage::Join { v: PROTOCOL_VERSION, role }
    }

    pub fn command(command: Command) -> Self {
        ClientMessage::Command { v: PROTOCOL_VERSION, command }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSummary {
    pub id: UnitId,
    pub kind: UnitKind,
    pub team: Team,
    pub pos: Vec2,
    pub hp: f64,
    pub max_hp: f64,
    pub mana: f64,
    pub max_mana: f64,
    pub statuses: Vec<StatusEffect>,
    pub level: u32,
    pub gold: u32,
    pub alive: bool,
    pub lane: Option<Lane>,
    pub kit: Option<String>,
}

impl From<&Unit> for UnitSummary {
    fn from(u: &Unit) -> Self {
        Self {
            id: u.id,
            kind: u.kind,
            team: u.team,
            pos: u.pos,
            hp: u.hp,
            max_hp: u.max_hp,
            mana: u.mana,
            max_mana: u.max_mana,
            statuses: u.statuses.clone(),
            level: u.level,
            gold: u.gold,
            alive: u.alive,
            lane: u.lane,
            kit: u.kit.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub tick: Tick,
    pub units: Vec<UnitSummary>,
    /// Spell cooldowns of the viewer's own hero; empty for spectators.
    pub cooldowns: Vec<SpellState>,
    /// Everything logged since the previous snapshot.
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Welcome {
        v: u32,
        role: Role,
        hero: Option<UnitId>,
        tick_rate: u32,
        snapshot_every: u64,
        config: Box<ArenaConfig>,
    },
    Snapshot {
        v: u32,
        #[serde(flatten)]
        snapshot: Snapshot,
    },
    Tip {
        v: u32,
        tip: TipEvent,
    },
    Event {
        v: u32,
        event: Event,
    },
    End {
        v: u32,
        winner: Option<Team>,
    },
    Error {
        v: u32,
        message: String,
    },
}

impl ServerMessage {
    pub fn error(message: impl Into<String>) -> Self {
        ServerMessage::Error { v: PROTOCOL_VERSION, message: message.into() }
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}

/// Fully built per-tick frame shared by every connection; cooldowns are picked
/// per viewer when the frame is sent.
#[derive(Debug, Clone)]
pub enum Broadcast {
    Snapshot {
        tick: Tick,
        units: Vec<UnitSummary>,
        cooldowns: Vec<(UnitId, Vec<SpellState>)>,
        events: Vec<Event>,
    },
    Tip(TipEvent),
    Event(Event),
    End(Option<Team>),
}

impl Broadcast {
    pub fn snapshot(state: &GameState, events: Vec<Event>) -> Self {
        Broadcast::Snapshot {
            tick: state.tick,
            units: state.units.values().map(UnitSummary::from).collect(),
            cooldowns: state.heroes().map(|h| (h.id, h.spells.clone())).collect(),
            events,
        }
    }

    pub fn for_viewer(&self, hero: Option<UnitId>) -> ServerMessage {
        let v = PROTOCOL_VERSION;
        match self {
            Broadcast::Snapshot { tick, units, cooldowns, events } => ServerMessage::Snapshot {
                v,
                snapshot: Snapshot {
                    tick: *tick,
                    units: units.clone(),
                    cooldowns: hero
                        .and_then(|h| cooldowns.iter().find(|(id, _)| *id == h))
                        .map(|(_, c)| c.clone())
                        .unwrap_or_default(),
                    events: events.clone(),
                },
            },
            Broadcast::Tip(tip) => ServerMessage::Tip { v, tip: tip.clone() },
            Broadcast::Event(event) => ServerMessage::Event { v, event: event.clone() },
            Broadcast::End(winner) => ServerMessage::End { v, winner: *winner },
        }
    }
}

/// Events worth a frame of their own; the rest only travel inside snapshots.
pub fn is_notable(event: &Event) -> bool {
    use moba_tutor::arena::EventKind::*;
    matches!(
        event.kind,
        Kill { .. } | TowerDestroyed { .. } | NexusDestroyed { .. } | Ping { .. } | LevelUp { .. } | Respawn { .. }
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn client_messages_parse_from_wire_text() {
        let m: ClientMessage = serde_json::from_str(r#"{"v":1,"type":"join","role":"player"}"#).unwrap();
        assert_eq!(m, ClientMessage::join(Role::Player));
        let m: ClientMessage =
            serde_json::from_str(r#"{"v":1,"type":"command","command":{"cmd":"MoveTo","pos":{"x":1.0,"y":2.0}}}"#)
                .unwrap();
        assert_eq!(m, ClientMessage::command(Command::MoveTo { pos: Vec2 { x: 1.0, y: 2.0 } }));
        assert!(serde_json::from_str::<ClientMessage>(r#"{"v":1,"type":"join","role":"player","x":1}"#).is_err());
        assert!(serde_json::from_str::<ClientMessage>(r#"{"v":1,"type":"dance"}"#).is_err());
    }

    #[test]
    fn snapshot_frames_flatten_and_pick_viewer_cooldowns() {
        let state = moba_tutor::arena::new_match(&ArenaConfig::default()).unwrap();
        let b = Broadcast::snapshot(&state, Vec::new());
        let hero = state.heroes().next().unwrap().id;
        let text = b.for_viewer(Some(hero)).to_text();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["type"], "snapshot");
        assert_eq!(v["v"], 1);
        assert_eq!(v["tick"], 0);
        assert!(!v["cooldowns"].as_array().unwrap().is_empty());
        let spectator = b.for_viewer(None).to_text();
        let v: serde_json::Value = serde_json::from_str(&spectator).unwrap();
        assert!(v["cooldowns"].as_array().unwrap().is_empty());
    }
}
