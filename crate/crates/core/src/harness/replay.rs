use std::collections::BTreeMap;

use super::session::{checksum, log_heroes};
use crate::analytics::{scorelines_from_events, MatchRecord, ScoreLine};
use crate::arena::{new_match, step, to_jsonl, ArenaConfig, CommandSet, Event, EventKind, Tick, UnitId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("event log line {line}: {msg}")]
    Corrupt { line: usize, msg: String },
    #[error("event log truncated after line {line}")]
    Truncated { line: usize },
    #[error("event log checksum {actual} does not match recorded {expected}")]
    ChecksumMismatch { expected: String, actual: String },
    #[error("scoreline for {player} differs: recorded {recorded:?}, replayed {replayed:?}")]
    ScoreMismatch {
        player: UnitId,
        recorded: Option<ScoreLine>,
        replayed: Option<ScoreLine>,
    },
    #[error("log was produced with config {logged}, replay config hashes to {actual}")]
    ConfigMismatch { logged: String, actual: String },
    #[error("resimulation diverges at log line {line}")]
    Diverged { line: usize },
}

/// Scorelines and checksum recomputed from an event log.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub events: Vec<Event>,
    pub scorelines: Vec<ScoreLine>,
    pub checksum: String,
}

/// Parses a JSONL event log. The log must open with `MatchStart`, keep ticks
/// nondecreasing and close with a newline-terminated `MatchEnd`.
pub fn parse_log(text: &str) -> Result<Vec<Event>, ReplayError> {
    let mut events: Vec<Event> = Vec::new();
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    for (i, raw) in lines.iter().enumerate() {
        let line = i + 1;
        let Some(body) = raw.strip_suffix('\n') else {
            return Err(ReplayError::Truncated { line: i });
        };
        let event: Event = serde_json::from_str(body).map_err(|e| ReplayError::Corrupt { line, msg: e.to_string() })?;
        let is_start = matches!(event.kind, EventKind::MatchStart { .. });
        if is_start != (line == 1) {
            let msg = if is_start { "unexpected MatchStart" } else { "log must begin with MatchStart" };
            return Err(ReplayError::Corrupt { line, msg: msg.into() });
        }
        if let Some(prev) = events.last() {
            if event.tick < prev.tick {
                return Err(ReplayError::Corrupt {
                    line,
                    msg: format!("tick {} after tick {}", event.tick, prev.tick),
                });
            }
            if matches!(prev.kind, EventKind::MatchEnd { .. }) {
                return Err(ReplayError::Corrupt { line, msg: "event after MatchEnd".into() });
            }
        }
        events.push(event);
    }
    if !matches!(events.last().map(|e| &e.kind), Some(EventKind::MatchEnd { .. })) {
        return Err(ReplayError::Truncated { line: events.len() });
    }
    Ok(events)
}

pub fn replay(text: &str) -> Result<Replay, ReplayError> {
    let events = parse_log(text)?;
    let heroes = log_heroes(&events);
    Ok(Replay {
        scorelines: scorelines_from_events(&events, &heroes),
        checksum: checksum(text.as_bytes()),
        events,
    })
}

/// Replays `text` and checks it against `record`.
pub fn verify(record: &MatchRecord, text: &str) -> Result<Replay, ReplayError> {
    let r = replay(text)?;
    let players: Vec<UnitId> = record.scorelines.iter().map(|s| s.player).chain(r.scorelines.iter().map(|s| s.player)).collect();
    for p in players {
        let recorded = record.scoreline(p).copied();
        let replayed = r.scorelines.iter().find(|s| s.player == p).copied();
        if recorded != replayed {
            return Err(ReplayError::ScoreMismatch { player: p, recorded, replayed });
        }
    }
    if r.checksum != record.log_checksum {
        return Err(ReplayError::ChecksumMismatch {
            expected: record.log_checksum.clone(),
            actual: r.checksum,
        });
    }
    Ok(r)
}

/// Re-runs the simulation from the commands and tips recorded in a log.
///
/// Returns the regenerated events; for a faithful log they serialize to the same bytes.
pub fn resimulate(arena: &ArenaConfig, text: &str) -> Result<Vec<Event>, ReplayError> {
    let logged = parse_log(text)?;
    let header = logged[0].clone();
    let EventKind::MatchStart { seed, config_hash, tutor, haste, .. } = &header.kind else {
        unreachable!("parse_log checks the header");
    };
    if *config_hash != arena.hash() {
        return Err(ReplayError::ConfigMismatch {
            logged: config_hash.clone(),
            actual: arena.hash(),
        });
    }
    let mut cfg = arena.clone();
    cfg.game.rng_seed = *seed;
    let mut state = new_match(&cfg).map_err(|e| ReplayError::Corrupt { line: 1, msg: e.to_string() })?;
    if let (Some(hero), Some(h)) = (tutor, haste) {
        if let Some(u) = state.unit_mut(*hero) {
            u.haste = Some(*h);
        }
    }
    let mut commands: BTreeMap<Tick, CommandSet> = BTreeMap::new();
    let mut tips: BTreeMap<Tick, Vec<Event>> = BTreeMap::new();
    for e in &logged[1..] {
        match &e.kind {
            EventKind::CommandIssued { hero, command } => {
                commands.entry(e.tick).or_default().insert(*hero, *command);
            }
            EventKind::TipEmitted { .. } => tips.entry(e.tick).or_default().push(e.clone()),
            _ => {}
        }
    }
    let mut out = vec![header];
    let none = CommandSet::new();
    let last_tick = logged.last().map_or(0, |e| e.tick);
    while !state.ended && state.tick <= last_tick {
        let t = state.tick;
        out.extend(tips.remove(&t).unwrap_or_default());
        out.extend(step(&mut state, commands.get(&t).unwrap_or(&none)));
    }
    Ok(out)
}

/// Resimulates and checks the regenerated log byte for byte.
pub fn resimulate_matches(arena: &ArenaConfig, text: &str) -> Result<(), ReplayError> {
    let regenerated = to_jsonl(&resimulate(arena, text)?);
    if regenerated == text {
        return Ok(());
    }
    let line = regenerated
        .lines()
        .zip(text.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| regenerated.lines().count().min(text.lines().count()))
        + 1;
    Err(ReplayError::Diverged { line })
}
