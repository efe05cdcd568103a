use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::node::BtNode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Success,
    Failure,
    Running,
}

/// What an action leaf reports when executed.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionOutcome<R> {
    pub status: Status,
    pub request: Option<R>,
}

impl<R> ActionOutcome<R> {
    pub fn success(request: R) -> Self {
        Self { status: Status::Success, request: Some(request) }
    }

    pub fn running(request: R) -> Self {
        Self { status: Status::Running, request: Some(request) }
    }

    pub fn failure() -> Self {
        Self { status: Status::Failure, request: None }
    }
}

type Predicate<V> = Box<dyn Fn(&V) -> bool + Send + Sync>;
type ActionFn<V, R> = Box<dyn Fn(&V) -> ActionOutcome<R> + Send + Sync>;

/// Named predicates and actions a tree may reference, evaluated against a view `V`
/// and producing requests `R`.
pub struct Registry<V, R> {
    conditions: BTreeMap<String, Predicate<V>>,
    actions: BTreeMap<String, ActionFn<V, R>>,
}

impl<V, R> Default for Registry<V, R> {
    fn default() -> Self {
        Self {
            conditions: BTreeMap::new(),
            actions: BTreeMap::new(),
        }
    }
}

impl<V, R> Registry<V, R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn condition(mut self, key: impl Into<String>, f: impl Fn(&V) -> bool + Send + Sync + 'static) -> Self {
        self.conditions.insert(key.into(), Box::new(f));
        self
    }

    pub fn action(
        mut self,
        key: impl Into<String>,
        f: impl Fn(&V) -> ActionOutcome<R> + Send + Sync + 'static,
    ) -> Self {
        self.actions.insert(key.into(), Box::new(f));
        self
    }

    pub fn keys(&self) -> KeySet {
        KeySet {
            conditions: self.conditions.keys().cloned().collect(),
            actions: self.actions.keys().cloned().collect(),
        }
    }
}

/// Keys a tree is validated against.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeySet {
    pub conditions: BTreeSet<String>,
    pub actions: BTreeSet<String>,
}

/// Per-tick evaluation context: the read-only view plus the request buffer.
///
/// Only the first request of a tick is kept; later ones are counted in `dropped`.
pub struct Blackboard<V, R> {
    pub view: V,
    request: Option<(String, R)>,
    dropped: usize,
    evaluations: usize,
    trace: Option<Vec<Vec<usize>>>,
}

impl<V, R> Blackboard<V, R> {
    pub fn new(view: V) -> Self {
        Self {
            view,
            request: None,
            dropped: 0,
            evaluations: 0,
            trace: None,
        }
    }

    /// Records the child-index path of every node visited.
    pub fn traced(view: V) -> Self {
        Self {
            trace: Some(Vec::new()),
            ..Self::new(view)
        }
    }

    pub fn request(&self) -> Option<&R> {
        self.request.as_ref().map(|(_, r)| r)
    }

    /// Key of the action that produced the kept request.
    pub fn requested_by(&self) -> Option<&str> {
        self.request.as_ref().map(|(k, _)| k.as_str())
    }

    pub fn take_request(&mut self) -> Option<(String, R)> {
        self.request.take()
    }

    pub fn dropped_requests(&self) -> usize {
        self.dropped
    }

    /// Nodes visited since the board was created.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn visited(&self) -> &[Vec<usize>] {
        self.trace.as_deref().unwrap_or(&[])
    }

    fn visit(&mut self, path: &[usize]) {
        self.evaluations += 1;
        if let Some(t) = &mut self.trace {
            t.push(path.to_vec());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TickError {
    #[error("unregistered condition key {0:?}")]
    UnknownCondition(String),
    #[error("unregistered action key {0:?}")]
    UnknownAction(String),
    #[error("composite node at {0:?} has no children")]
    EmptyComposite(Vec<usize>),
}

/// Evaluates the tree once from the root. No state survives between ticks.
pub fn tick<V, R>(node: &BtNode, registry: &Registry<V, R>, board: &mut Blackboard<V, R>) -> Result<Status, TickError> {
    let mut path = Vec::new();
    tick_at(node, registry, board, &mut path)
}

fn tick_at<V, R>(
    node: &BtNode,
    registry: &Registry<V, R>,
    board: &mut Blackboard<V, R>,
    path: &mut Vec<usize>,
) -> Result<Status, TickError> {
    board.visit(path);
    match node {
        BtNode::Sequencer { children } | BtNode::Selector { children } => {
            if children.is_empty() {
                return Err(TickError::EmptyComposite(path.clone()));
            }
            // Sequencer stops on the first non-Success, Selector on the first non-Failure.
            let stop_unless = if matches!(node, BtNode::Sequencer { .. }) {
                Status::Success
            } else {
                Status::Failure
            };
            for (i, child) in children.iter().enumerate() {
                path.push(i);
                let status = tick_at(child, registry, board, path);
                path.pop();
                let status = status?;
                if status != stop_unless {
                    return Ok(status);
                }
            }
            Ok(stop_unless)
        }
        BtNode::Condition { key } => {
            let pred = registry
                .conditions
                .get(key)
                .ok_or_else(|| TickError::UnknownCondition(key.clone()))?;
            Ok(if pred(&board.view) { Status::Success } else { Status::Failure })
        }
        BtNode::Action { key } => {
            let act = registry
                .actions
                .get(key)
                .ok_or_else(|| TickError::UnknownAction(key.clone()))?;
            let outcome = act(&board.view);
            if let Some(req) = outcome.request {
                if board.request.is_none() {
                    board.request = Some((key.clone(), req));
                } else {
                    board.dropped += 1;
                }
            }
            Ok(outcome.status)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("unregistered condition key {key:?} at {path:?}")]
    UnknownCondition { key: String, path: Vec<usize> },
    #[error("unregistered action key {key:?} at {path:?}")]
    UnknownAction { key: String, path: Vec<usize> },
    #[error("empty composite at {path:?}")]
    EmptyComposite { path: Vec<usize> },
}

impl ValidationError {
    /// The offending key, for unregistered-key errors.
    pub fn key(&self) -> Option<&str> {
        match self {
            ValidationError::UnknownCondition { key, .. } | ValidationError::UnknownAction { key, .. } => Some(key),
            ValidationError::EmptyComposite { .. } => None,
        }
    }
}

impl fmt::Display for KeySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conditions {:?}, actions {:?}", self.conditions, self.actions)
    }
}

/// Reports every unregistered key and every empty composite, in depth-first order.
pub fn validate(tree: &BtNode, keys: &KeySet) -> Result<(), Vec<ValidationError>> {
    let mut errors = Vec::new();
    let mut path = Vec::new();
    collect_errors(tree, keys, &mut path, &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn collect_errors(node: &BtNode, keys: &KeySet, path: &mut Vec<usize>, out: &mut Vec<ValidationError>) {
    match node {
        BtNode::Sequencer { children } | BtNode::Selector { children } => {
            if children.is_empty() {
                out.push(ValidationError::EmptyComposite { path: path.clone() });
            }
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                collect_errors(c, keys, path, out);
                path.pop();
            }
        }
        BtNode::Condition { key } if !keys.conditions.contains(key) => out.push(ValidationError::UnknownCondition {
            key: key.clone(),
            path: path.clone(),
        }),
        BtNode::Action { key } if !keys.actions.contains(key) => out.push(ValidationError::UnknownAction {
            key: key.clone(),
            path: path.clone(),
        }),
        _ => {}
    }
}

/// A tree that passed validation against a key set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorTree {
    root: BtNode,
}

impl BehaviorTree {
    pub fn build(root: BtNode, keys: &KeySet) -> Result<Self, Vec<ValidationError>> {
        validate(&root, keys)?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &BtNode {
        &self.root
    }

    pub fn tick<V, R>(&self, registry: &Registry<V, R>, board: &mut Blackboard<V, R>) -> Result<Status, TickError> {
        tick(&self.root, registry, board)
    }
}
