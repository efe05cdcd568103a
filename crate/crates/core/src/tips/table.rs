use std::collections::BTreeSet;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Condition a rule watches for, evaluated per subject hero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum TriggerSpec {
    /// hp / max_hp below `frac`.
    LowHealth { frac: f64 },
    /// Inside an enemy tower's range while that tower is (or is free to start) shooting the subject.
    InTowerRange,
    /// At least `min_count` living enemy heroes within `radius`.
    EnemyFocus { radius: f64, min_count: u32 },
    /// At least `min_count` enemy minions auto-attacking the subject.
    MinionAggro { min_count: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PingStyle {
    Danger,
    Caution,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    PartnerPos,
    ThreatPos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PingSpec {
    pub kind: PingStyle,
    pub anchor: Anchor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    Partner,
    Team,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TipRule {
    pub id: String,
    pub trigger: TriggerSpec,
    pub message: String,
    pub ping: PingSpec,
    pub scope: Scope,
    pub cooldown: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableError {
    #[error("line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("line {line}: unknown trigger kind {kind:?}")]
    UnknownTrigger { kind: String, line: usize },
    #[error("line {line}: duplicate rule id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("line {line}: rule {id:?} {reason}")]
    Invalid { id: String, line: usize, reason: String },
}

/// Validated lookup table of tip rules, in file order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TipTable {
    rules: Vec<TipRule>,
}

pub const DEFAULT_TABLE_JSON: &str = include_str!("../../assets/default_tips.json");

impl TipTable {
    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let rules: Vec<TipRule> = serde_json::from_str(text).map_err(|e| classify(text, e))?;
        let mut seen = BTreeSet::new();
        for rule in &rules {
            if !seen.insert(rule.id.clone()) {
                return Err(TableError::DuplicateId {
                    id: rule.id.clone(),
                    line: nth_id_line(text, &rule.id, 1),
                });
            }
            if let Err(reason) = check_rule(rule) {
                return Err(TableError::Invalid {
                    id: rule.id.clone(),
                    line: nth_id_line(text, &rule.id, 0),
                    reason,
                });
            }
        }
        Ok(Self { rules })
    }

    pub fn new(rules: Vec<TipRule>) -> Result<Self, TableError> {
        let text = serde_json::to_string_pretty(&rules).expect("rules serialize");
        Self::from_json(&text)
    }

    pub fn default_table() -> Self {
        Self::from_json(DEFAULT_TABLE_JSON).expect("shipped tip table is valid")
    }

    pub fn rules(&self) -> &[TipRule] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&TipRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.rules).expect("rules serialize")
    }
}

fn check_rule(rule: &TipRule) -> Result<(), String> {
    if rule.id.is_empty() {
        return Err("has an empty id".into());
    }
    if rule.message.trim().is_empty() {
        return Err("has an empty message".into());
    }
    if rule.cooldown == 0 {
        return Err("cooldown must be positive".into());
    }
    match rule.trigger {
        TriggerSpec::LowHealth { frac } if !(frac > 0.0 && frac < 1.0) => Err("LowHealth frac must be in (0, 1)".into()),
        TriggerSpec::EnemyFocus { radius, min_count } if !(radius > 0.0) || min_count == 0 => {
            Err("EnemyFocus needs radius > 0 and min_count >= 1".into())
        }
        TriggerSpec::MinionAggro { min_count: 0 } => Err("MinionAggro min_count must be >= 1".into()),
        _ => Ok(()),
    }
}

fn classify(text: &str, e: serde_json::Error) -> TableError {
    let msg = e.to_string();
    let trigger_variant = Regex::new(r"unknown variant `([^`]*)`, expected one of `LowHealth`").expect("regex");
    if let Some(c) = trigger_variant.captures(&msg) {
        let kind = c[1].to_string();
        let line = kind_line(text, &kind).unwrap_or(e.line());
        return TableError::UnknownTrigger { kind, line };
    }
    TableError::Parse {
        line: e.line(),
        column: e.column(),
        msg,
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset].matches('\n').count() + 1
}

fn kind_line(text: &str, kind: &str) -> Option<usize> {
    let re = Regex::new(&format!(r#""kind"\s*:\s*"{}""#, regex::escape(kind))).ok()?;
    re.find(text).map(|m| line_of_offset(text, m.start()))
}

/// Line of the `n`th (0-based) `"id": "<id>"` occurrence.
fn nth_id_line(text: &str, id: &str, n: usize) -> usize {
    let escaped = serde_json::to_string(id).expect("string serializes");
    let re = Regex::new(&format!(r#""id"\s*:\s*{}"#, regex::escape(&escaped))).expect("regex");
    let found = re.find_iter(text).nth(n).map(|m| line_of_offset(text, m.start()));
    found.unwrap_or(1)
}
