use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Behavior tree node as stored in tree definition files:
/// nested `{type, key?, children?}` records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum BtNode {
    /// Runs children left to right until one does not succeed.
    Sequencer { children: Vec<BtNode> },
    /// Runs children left to right until one does not fail.
    Selector { children: Vec<BtNode> },
    /// Boolean question over the blackboard.
    Condition { key: String },
    /// Leaf that may emit one request.
    Action { key: String },
}

impl BtNode {
    pub fn sequencer(children: Vec<BtNode>) -> Self {
        BtNode::Sequencer { children }
    }

    pub fn selector(children: Vec<BtNode>) -> Self {
        BtNode::Selector { children }
    }

    pub fn condition(key: impl Into<String>) -> Self {
        BtNode::Condition { key: key.into() }
    }

    pub fn action(key: impl Into<String>) -> Self {
        BtNode::Action { key: key.into() }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }

    pub fn children(&self) -> &[BtNode] {
        match self {
            BtNode::Sequencer { children } | BtNode::Selector { children } => children,
            _ => &[],
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(BtNode::depth).max().unwrap_or(0)
    }

    pub fn condition_keys(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.walk(&mut |n| {
            if let BtNode::Condition { key } = n {
                out.insert(key.as_str());
            }
        });
        out
    }

    pub fn action_keys(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.walk(&mut |n| {
            if let BtNode::Action { key } = n {
                out.insert(key.as_str());
            }
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a BtNode)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let tree = BtNode::selector(vec![BtNode::condition("low"), BtNode::action("heal")]);
        let json = serde_json::to_string(&tree).unwrap();
        assert_eq!(
            json,
            r#"{"type":"Selector","children":[{"type":"Condition","key":"low"},{"type":"Action","key":"heal"}]}"#
        );
        assert_eq!(BtNode::from_json(&json).unwrap(), tree);
        assert_eq!(tree.depth(), 2);
    }

    #[test]
    fn decorators_are_not_a_node_kind() {
        let err = BtNode::from_json(r#"{"type":"Inverter","children":[]}"#).unwrap_err();
        assert!(err.to_string().contains("Inverter"));
    }
}
