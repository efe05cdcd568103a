use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::policy::{NoviceParams, ScriptedHero};
use super::HarnessError;
use crate::analytics::{scorelines_from_events, Condition, MatchRecord, Phase};
use crate::arena::{new_match, step, to_jsonl, ArenaConfig, CommandSet, Event, EventKind, GameState, Haste, Team, UnitId};
use crate::bt::BtNode;
use crate::tips::{TipEngine, TipEvent, TipTable};
use crate::tutor::{default_tree, select_partner, Decision, TutorConfig, TutorState};

/// Everything needed to start a match apart from the seed.
#[derive(Debug, Clone)]
pub struct MatchSetup {
    pub arena: ArenaConfig,
    pub condition: Condition,
    pub novice: NoviceParams,
    pub bots: NoviceParams,
    pub tutor: TutorConfig,
    pub tree: BtNode,
    pub tips: TipTable,
}

impl MatchSetup {
    /// Default policies, tutor, tree and tip table for `arena`.
    pub fn new(arena: ArenaConfig, condition: Condition) -> Self {
        let tutor = TutorConfig::for_team_size(arena.game.heroes_per_team);
        Self {
            arena,
            condition,
            novice: NoviceParams::default(),
            bots: NoviceParams::lane_bot(),
            tutor,
            tree: default_tree(),
            tips: TipTable::default_table(),
        }
    }

    pub fn with_novice(mut self, novice: NoviceParams) -> Self {
        self.novice = novice;
        self
    }
}

/// Hero slots with a fixed role on the blue team.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roles {
    pub novice: UnitId,
    /// Slot the tutor occupies when enabled; a lane bot plays it otherwise.
    pub tutor_slot: UnitId,
}

/// The first blue support-kit hero (else the last blue hero) is the tutor slot;
/// the novice is the ally the tutor would pick as partner.
pub fn assign_roles(state: &GameState) -> Result<Roles, HarnessError> {
    let blue: Vec<_> = state.team_heroes(Team::Blue).collect();
    let tutor_slot = blue
        .iter()
        .find(|u| u.kit.as_deref() == Some("support"))
        .or(blue.last())
        .map(|u| u.id)
        .ok_or_else(|| HarnessError::Spec("blue team has no heroes".into()))?;
    if blue.len() < 2 {
        return Err(HarnessError::Spec("a novice and a tutor slot need at least two heroes per team".into()));
    }
    let novice = select_partner(state, Team::Blue, Some(tutor_slot))?;
    Ok(Roles { novice, tutor_slot })
}

/// Whether the novice hero is driven by the scripted policy or by commands from outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoviceControl {
    Scripted,
    External,
}

/// A match in progress with its controllers and logs.
#[derive(Debug)]
pub struct MatchSession {
    pub state: GameState,
    pub roles: Roles,
    pub condition: Condition,
    pub seed: u64,
    pub config_hash: String,
    pub tutor: Option<TutorState>,
    pub tips: Option<TipEngine>,
    pub policies: BTreeMap<UnitId, ScriptedHero>,
    pub events: Vec<Event>,
    pub trace: Vec<Decision>,
    rng: ChaCha8Rng,
}

impl MatchSession {
    pub fn new(setup: &MatchSetup, seed: u64, control: NoviceControl) -> Result<Self, HarnessError> {
        setup.novice.validate()?;
        setup.bots.validate()?;
        let mut arena = setup.arena.clone();
        arena.game.rng_seed = seed;
        let mut state = new_match(&arena)?;
        let roles = assign_roles(&state)?;
        let mut tutor = None;
        let mut haste = None;
        if setup.condition.has_tutor() {
            let t = TutorState::new(&state, roles.tutor_slot, setup.tutor.clone(), setup.tree.clone())?;
            debug_assert_eq!(t.partner, roles.novice);
            let h = Haste {
                trigger: t.config.passive_trigger,
                boost_pct: t.config.passive_boost_pct,
            };
            state.unit_mut(t.hero).expect("tutor hero exists").haste = Some(h);
            haste = Some(h);
            tutor = Some(t);
        }
        let tips = setup.condition.has_tips().then(|| TipEngine::new(setup.tips.clone()));
        let mut policies = BTreeMap::new();
        for team in [Team::Blue, Team::Red] {
            for id in state.hero_ids(team) {
                let params = if id == roles.novice {
                    if control == NoviceControl::External {
                        continue;
                    }
                    setup.novice
                } else if tutor.is_some() && id == roles.tutor_slot {
                    continue;
                } else {
                    setup.bots
                };
                policies.insert(id, ScriptedHero::new(id, params));
            }
        }
        let mut heroes = state.hero_ids(Team::Blue);
        heroes.extend(state.hero_ids(Team::Red));
        let config_hash = arena.hash();
        let header = Event::new(0, EventKind::MatchStart {
            seed,
            config_hash: config_hash.clone(),
            heroes,
            tutor: tutor.as_ref().map(|t| t.hero),
            haste,
        });
        Ok(Self {
            state,
            roles,
            condition: setup.condition,
            seed,
            config_hash,
            tutor,
            tips,
            policies,
            events: vec![header],
            trace: Vec::new(),
            rng: policy_rng(seed),
        })
    }

    pub fn finished(&self) -> bool {
        self.state.ended
    }

    /// Tips for the current tick, then controller decisions, then one simulation
    /// step. `external` commands take precedence over scripted ones. Returns the
    /// events logged for this tick.
    pub fn tick(&mut self, external: &CommandSet) -> Result<Vec<Event>, HarnessError> {
        if self.state.ended {
            return Ok(Vec::new());
        }
        let now = self.state.tick;
        let tips: Vec<TipEvent> = match (&mut self.tips, &self.tutor) {
            (Some(engine), Some(t)) => engine.evaluate(&self.state, t.partner),
            _ => Vec::new(),
        };
        let mut logged: Vec<Event> = tips
            .iter()
            .map(|tip| Event::new(now, EventKind::TipEmitted { tip: tip.clone() }))
            .collect();
        let mut commands = external.clone();
        for (id, policy) in &mut self.policies {
            if let Some(c) = policy.decide(&self.state, &tips, &mut self.rng) {
                commands.entry(*id).or_insert(c);
            }
        }
        if let Some(t) = &self.tutor {
            if self.state.unit(t.hero).is_some_and(|u| u.alive) {
                let d = t.decide(&self.state)?;
                commands.insert(t.hero, d.command);
                self.trace.push(d);
            }
        }
        logged.extend(step(&mut self.state, &commands));
        self.events.extend(logged.iter().cloned());
        Ok(logged)
    }

    pub fn run_to_end(&mut self) -> Result<(), HarnessError> {
        let none = CommandSet::new();
        while !self.state.ended {
            self.tick(&none)?;
        }
        Ok(())
    }

    /// Summarizes the match. The record names its event log `<match_id>.events.jsonl`.
    pub fn finish(self, match_id: impl Into<String>) -> MatchOutcome {
        let match_id = match_id.into();
        let log = to_jsonl(&self.events);
        let heroes = log_heroes(&self.events);
        let record = MatchRecord {
            event_log: format!("{match_id}.events.jsonl"),
            match_id,
            seed: self.seed,
            config_hash: self.config_hash,
            condition: self.condition,
            group: None,
            phase: None,
            duration_ticks: self.state.tick,
            winner: self.state.winner,
            novice: self.roles.novice,
            tutor: self.tutor.as_ref().map(|t| t.hero),
            scorelines: scorelines_from_events(&self.events, &heroes),
            log_checksum: checksum(log.as_bytes()),
        };
        MatchOutcome {
            record,
            events: self.events,
            trace: self.trace,
            log,
        }
    }
}

/// Generator for controller randomness, independent of the arena's own stream.
fn policy_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

pub(crate) fn log_heroes(events: &[Event]) -> Vec<UnitId> {
    match events.first().map(|e| &e.kind) {
        Some(EventKind::MatchStart { heroes, .. }) => heroes.clone(),
        _ => Vec::new(),
    }
}

pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A finished match: its record, full event log and tutor decision trace.
#[derive(Debug, Clone)]
pub struct MatchOutcome {
    pub record: MatchRecord,
    pub events: Vec<Event>,
    pub trace: Vec<Decision>,
    /// The event log as JSON Lines; `record.log_checksum` hashes these bytes.
    pub log: String,
}

impl MatchOutcome {
    pub fn labelled(mut self, group: Option<Condition>, phase: Option<Phase>) -> Self {
        self.record.group = group;
        self.record.phase = phase;
        self
    }
}

/// Runs one headless match to its end.
pub fn run_match(setup: &MatchSetup, seed: u64) -> Result<MatchOutcome, HarnessError> {
    let mut session = MatchSession::new(setup, seed, NoviceControl::Scripted)?;
    session.run_to_end()?;
    Ok(session.finish(format!("{}-{seed}", setup.condition)))
}
