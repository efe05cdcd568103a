//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use moba_tutor::arena::{ArenaConfig, GameState, UnitId, UnitKind};
use moba_tutor::bt::{ActionOutcome, BtNode, Registry, Status};
use moba_tutor::tips::{Scope, TipTable, TriggerSpec};

/// Branch-free form of the KDA factor.
pub fn kda_reference(k: i64, d: i64, a: i64) -> f64 {
    (k + a) as f64 / d.max(1) as f64
}

pub fn arena_with_ticks(max_ticks: u64) -> ArenaConfig {
    let mut cfg = ArenaConfig::default();
    cfg.game.max_ticks = max_ticks;
    cfg
}

// ---- behavior trees ----

#[derive(Debug, Clone)]
pub enum Shape {
    Leaf,
    Seq(Vec<Shape>),
    Sel(Vec<Shape>),
}

/// Every tree shape of depth at most `depth` (a single leaf has depth 1) with
/// composites of arity 1 to 3.
pub fn shapes(depth: usize) -> Vec<Shape> {
    if depth <= 1 {
        return vec![Shape::Leaf];
    }
    let sub = shapes(depth - 1);
    let mut out = vec![Shape::Leaf];
    for arity in 1..=3 {
        for combo in tuples(&sub, arity) {
            out.push(Shape::Seq(combo.clone()));
            out.push(Shape::Sel(combo));
        }
    }
    out
}

fn tuples(items: &[Shape], n: usize) -> Vec<Vec<Shape>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in tuples(items, n - 1) {
        for it in items {
            let mut v = rest.clone();
            v.push(it.clone());
            out.push(v);
        }
    }
    out
}

/// Leaf number `i` in depth-first order is a condition when `i % 3 == 0`, an action otherwise.
pub fn is_condition_leaf(i: usize) -> bool {
    i % 3 == 0
}

#[derive(Debug, Clone)]
pub enum RefNode {
    Leaf(usize),
    Seq(Vec<RefNode>),
    Sel(Vec<RefNode>),
}

pub fn number(shape: &Shape, next: &mut usize) -> RefNode {
    match shape {
        Shape::Leaf => {
            *next += 1;
            RefNode::Leaf(*next - 1)
        }
        Shape::Seq(c) => RefNode::Seq(c.iter().map(|s| number(s, next)).collect()),
        Shape::Sel(c) => RefNode::Sel(c.iter().map(|s| number(s, next)).collect()),
    }
}

pub fn to_bt(node: &RefNode) -> BtNode {
    match node {
        RefNode::Leaf(i) if is_condition_leaf(*i) => BtNode::Condition { key: format!("c{i}") },
        RefNode::Leaf(i) => BtNode::Action { key: format!("a{i}") },
        RefNode::Seq(c) => BtNode::Sequencer { children: c.iter().map(to_bt).collect() },
        RefNode::Sel(c) => BtNode::Selector { children: c.iter().map(to_bt).collect() },
    }
}

/// Leaves whose handler is consulted, in order, plus total nodes touched.
#[derive(Debug, Default, PartialEq)]
pub struct RefRun {
    pub touched: usize,
    pub leaves: Vec<usize>,
}

/// Plain recursive evaluation: a sequence is the first non-success child (else
/// success), a selector the first non-failure child (else failure).
pub fn ref_eval(node: &RefNode, assign: &[Status], run: &mut RefRun) -> Status {
    run.touched += 1;
    match node {
        RefNode::Leaf(i) => {
            run.leaves.push(*i);
            assign[*i]
        }
        RefNode::Seq(c) => c
            .iter()
            .map(|n| ref_eval(n, assign, run))
            .find(|s| *s != Status::Success)
            .unwrap_or(Status::Success),
        RefNode::Sel(c) => c
            .iter()
            .map(|n| ref_eval(n, assign, run))
            .find(|s| *s != Status::Failure)
            .unwrap_or(Status::Failure),
    }
}

pub fn leaf_count(node: &RefNode) -> usize {
    match node {
        RefNode::Leaf(_) => 1,
        RefNode::Seq(c) | RefNode::Sel(c) => c.iter().map(leaf_count).sum(),
    }
}

/// Registry whose leaf `i` reports `view[i]`; actions request `i` unless they fail.
pub fn status_registry(max_leaves: usize) -> Registry<Vec<Status>, usize> {
    let mut reg = Registry::new();
    for i in 0..max_leaves {
        reg = reg
            .condition(format!("c{i}"), move |v: &Vec<Status>| v[i] == Status::Success)
            .action(format!("a{i}"), move |v: &Vec<Status>| match v[i] {
                Status::Success => ActionOutcome::success(i),
                Status::Running => ActionOutcome::running(i),
                Status::Failure => ActionOutcome::failure(),
            });
    }
    reg
}

/// Every status assignment for `leaves` leaves, respecting the condition/action split.
pub fn assignments(leaves: usize) -> Vec<Vec<Status>> {
    let mut out = vec![Vec::new()];
    for i in 0..leaves {
        let options: &[Status] = if is_condition_leaf(i) {
            &[Status::Success, Status::Failure]
        } else {
            &[Status::Success, Status::Failure, Status::Running]
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |s| {
                    let mut v = prefix.clone();
                    v.push(*s);
                    v
                })
            })
            .collect();
    }
    out
}

// ---- tips ----

fn dist(a: &moba_tutor::arena::Unit, b: &moba_tutor::arena::Unit) -> f64 {
    ((a.pos.x - b.pos.x).powi(2) + (a.pos.y - b.pos.y).powi(2)).sqrt()
}

/// Every (rule, hero) whose trigger holds this tick, by scanning all units.
pub fn brute_fires(state: &GameState, partner: UnitId, table: &TipTable) -> BTreeSet<(String, UnitId)> {
    let mut out = BTreeSet::new();
    let Some(p) = state.units.get(&partner) else {
        return out;
    };
    for rule in table.rules() {
        let subjects: Vec<UnitId> = match rule.scope {
            Scope::Partner => vec![partner],
            Scope::Team => state
                .units
                .values()
                .filter(|u| u.kind == UnitKind::Hero && u.team == p.team && u.alive)
                .map(|u| u.id)
                .collect(),
        };
        for sid in subjects {
            let s = &state.units[&sid];
            if !s.alive {
                continue;
            }
            let all = || state.units.values().filter(|u| u.alive);
            let holds = match rule.trigger {
                TriggerSpec::LowHealth { frac } => s.hp / s.max_hp < frac,
                TriggerSpec::InTowerRange => all().any(|t| {
                    t.kind == UnitKind::Tower
                        && t.team != s.team
                        && dist(t, s) <= t.attack.range
                        && (t.target == Some(sid)
                            || !all().any(|m| m.kind == UnitKind::Minion && m.team == s.team && dist(m, t) <= t.attack.range))
                }),
                TriggerSpec::EnemyFocus { radius, min_count } => {
                    all().filter(|h| h.kind == UnitKind::Hero && h.team != s.team && dist(h, s) <= radius).count()
                        >= min_count as usize
                }
                TriggerSpec::MinionAggro { min_count } => {
                    all()
                        .filter(|m| {
                            m.kind == UnitKind::Minion
                                && m.team != s.team
                                && m.target == Some(sid)
                                && dist(m, s) <= m.attack.range + 1e-6
                        })
                        .count()
                        >= min_count as usize
                }
            };
            if holds {
                out.insert((rule.id.clone(), sid));
            }
        }
    }
    out
}
