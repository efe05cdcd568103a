mod common;

use std::collections::BTreeSet;

use common::*;
use moba_tutor::bt::*;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Gen {
    Leaf { condition: bool, planted: bool },
    Composite { sequencer: bool, children: Vec<Gen> },
}

fn gen_tree() -> impl Strategy<Value = Gen> {
    let leaf = (any::<bool>(), prop::bool::weighted(0.2)).prop_map(|(condition, planted)| Gen::Leaf { condition, planted });
    leaf.prop_recursive(4, 40, 3, |inner| {
        (any::<bool>(), prop::collection::vec(inner, 0..=3)).prop_map(|(sequencer, children)| Gen::Composite { sequencer, children })
    })
}

/// Builds the tree and the errors the generator planted, in depth-first order.
fn realize(g: &Gen, path: &mut Vec<usize>, planted: &mut Vec<ValidationError>) -> BtNode {
    match g {
        Gen::Leaf { condition, planted: bad } => {
            let key = if *bad { format!("missing_{}", planted.len()) } else { "known".to_string() };
            if *bad {
                planted.push(if *condition {
                    ValidationError::UnknownCondition { key: key.clone(), path: path.clone() }
                } else {
                    ValidationError::UnknownAction { key: key.clone(), path: path.clone() }
                });
            }
            if *condition {
                BtNode::condition(key)
            } else {
                BtNode::action(key)
            }
        }
        Gen::Composite { sequencer, children } => {
            if children.is_empty() {
                planted.push(ValidationError::EmptyComposite { path: path.clone() });
            }
            let kids = children
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    path.push(i);
                    let n = realize(c, path, planted);
                    path.pop();
                    n
                })
                .collect();
            if *sequencer {
                BtNode::sequencer(kids)
            } else {
                BtNode::selector(kids)
            }
        }
    }
}

fn known_keys() -> KeySet {
    KeySet {
        conditions: BTreeSet::from(["known".to_string()]),
        actions: BTreeSet::from(["known".to_string()]),
    }
}

proptest! {
    #[test]
    fn validator_finds_exactly_the_planted_defects(g in gen_tree()) {
        let mut planted = Vec::new();
        let tree = realize(&g, &mut Vec::new(), &mut planted);
        match validate(&tree, &known_keys()) {
            Ok(()) => prop_assert!(planted.is_empty()),
            Err(found) => prop_assert_eq!(found, planted),
        }
    }

    #[test]
    fn json_round_trip(g in gen_tree()) {
        let tree = realize(&g, &mut Vec::new(), &mut Vec::new());
        prop_assert_eq!(BtNode::from_json(&tree.to_json_pretty()).unwrap(), tree);
    }
}

#[test]
fn registered_keys_pass() {
    let tree = BtNode::selector(vec![BtNode::condition("known"), BtNode::action("known")]);
    assert!(validate(&tree, &known_keys()).is_ok());
    assert!(BehaviorTree::build(tree, &known_keys()).is_ok());
}

#[test]
fn nope_with_empty_registry() {
    let errs = validate(&BtNode::condition("nope"), &KeySet::default()).unwrap_err();
    let keys: Vec<_> = errs.iter().filter_map(|e| e.key()).collect();
    assert_eq!(keys, ["nope"]);
}

#[test]
fn depth_two_matches_reference() {
    let reg = status_registry(3);
    for shape in shapes(2) {
        let numbered = number(&shape, &mut 0);
        let tree = to_bt(&numbered);
        for assign in assignments(leaf_count(&numbered)) {
            let mut run = RefRun::default();
            let want = ref_eval(&numbered, &assign, &mut run);
            let mut board = Blackboard::traced(assign.clone());
            assert_eq!(tick(&tree, &reg, &mut board).unwrap(), want);
            assert_eq!(board.visited().len(), run.touched);
        }
    }
}

#[test]
fn empty_composite_errors_at_tick() {
    let reg: Registry<(), ()> = Registry::new();
    let mut board = Blackboard::new(());
    let tree = BtNode::sequencer(vec![BtNode::selector(vec![])]);
    assert_eq!(tick(&tree, &reg, &mut board), Err(TickError::EmptyComposite(vec![0])));
}

#[test]
fn shipped_tutor_tree_is_valid() {
    let tree = moba_tutor::tutor::default_tree();
    assert!(validate(&tree, &moba_tutor::tutor::registry_keys()).is_ok());
    assert_eq!(tree.children().len(), 5);
    assert_eq!(tree.depth(), 5);
}
