//! Deterministic adversary strategies over a protocol tree.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::prob::{scalar_from_json, Prob, Scalar};
use crate::tree::{Node, Path, ProtocolTree};
use crate::types::Party;

/// What the cheating party does at one node.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision<T> {
    /// Send the message with this branch index.
    Send(usize),
    /// Steer a weak-coin-flip node so that Alice wins with this probability.
    Force(Prob<T>),
}

/// A cheating party's strategy, keyed by node path.
///
/// Every send node of `party` that the script can reach must carry a
/// decision. Weak-coin-flip nodes without a decision are played honestly.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryScript<T> {
    pub party: Party,
    pub decisions: BTreeMap<Path, Decision<T>>,
}

impl<T: Scalar> AdversaryScript<T> {
    pub fn new(party: Party) -> Self {
        AdversaryScript {
            party,
            decisions: BTreeMap::new(),
        }
    }

    pub fn with(mut self, path: Path, decision: Decision<T>) -> Self {
        self.decisions.insert(path, decision);
        self
    }

    /// Checks that each decision fits its node and that every reachable
    /// send node of the scripted party has one.
    pub fn validate(&self, tree: &ProtocolTree<T>) -> Result<()> {
        for (path, decision) in &self.decisions {
            let node = tree
                .node_at(path)
                .ok_or_else(|| Error::ScriptMismatch(format!("no node at path {path:?}")))?;
            match (&**node, decision) {
                (Node::Send { sender, branches }, Decision::Send(i)) => {
                    if *sender != self.party {
                        return Err(Error::ScriptMismatch(format!(
                            "node at {path:?} is sent by {sender}, not {}",
                            self.party
                        )));
                    }
                    if *i >= branches.len() {
                        return Err(Error::ScriptMismatch(format!(
                            "branch {i} does not exist at {path:?}"
                        )));
                    }
                }
                (Node::Wcf { spec, .. }, Decision::Force(q)) => {
                    let (lo, hi) = spec.steerable_range(self.party);
                    if q.get() < lo || q.get() > hi {
                        return Err(Error::ScriptMismatch(format!(
                            "forcing {q} at {path:?} is outside [{lo}, {hi}] for {}",
                            self.party
                        )));
                    }
                }
                _ => {
                    return Err(Error::ScriptMismatch(format!(
                        "decision at {path:?} does not match the node kind"
                    )))
                }
            }
        }
        self.check_coverage(&tree.root, &mut Vec::new())
    }

    fn check_coverage(&self, node: &Node<T>, path: &mut Path) -> Result<()> {
        match node {
            Node::Send { sender, branches } if *sender == self.party => {
                match self.decisions.get(path.as_slice()) {
                    Some(Decision::Send(i)) => {
                        path.push(*i);
                        let r = self.check_coverage(&branches[*i].child, path);
                        path.pop();
                        r
                    }
                    _ => Err(Error::ScriptMismatch(format!(
                        "no decision for {}'s send node at {path:?}",
                        self.party
                    ))),
                }
            }
            _ => {
                for (i, child) in node.children().into_iter().enumerate() {
                    path.push(i);
                    self.check_coverage(child, path)?;
                    path.pop();
                }
                Ok(())
            }
        }
    }

    /// JSON form: `{"party":..,"decisions":[{"path":[..],"send":"<msg>"} |
    /// {"path":[..],"alice_wins":P}]}`.
    pub fn to_json(&self, tree: &ProtocolTree<T>) -> Value {
        let decisions: Vec<Value> = self
            .decisions
            .iter()
            .map(|(path, d)| match d {
                Decision::Send(i) => {
                    let msg = match tree.node_at(path).map(|n| &**n) {
                        Some(Node::Send { branches, .. }) if *i < branches.len() => {
                            branches[*i].msg.clone()
                        }
                        _ => i.to_string(),
                    };
                    json!({ "path": path, "send": msg })
                }
                Decision::Force(q) => json!({ "path": path, "alice_wins": q.value().to_wire() }),
            })
            .collect();
        json!({ "party": self.party.as_str(), "decisions": decisions })
    }

    pub fn from_json(value: &Value, tree: &ProtocolTree<T>) -> Result<Self> {
        let bad = |m: String| Error::Parse(format!("adversary script: {m}"));
        let party: Party = value
            .get("party")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing \"party\"".into()))?
            .parse()?;
        let list = match value.get("decisions") {
            Some(Value::Array(items)) => items.as_slice(),
            None => &[],
            Some(other) => {
                return Err(bad(format!(
                    "\"decisions\" must be an array, found {other}"
                )))
            }
        };
        let mut script = AdversaryScript::new(party);
        for (k, item) in list.iter().enumerate() {
            let path: Path = match item.get("path") {
                Some(Value::Array(steps)) => steps
                    .iter()
                    .map(|s| s.as_u64().map(|v| v as usize))
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad(format!("decisions[{k}].path must hold indices")))?,
                _ => return Err(bad(format!("decisions[{k}] lacks a \"path\" array"))),
            };
            let decision = if let Some(msg) = item.get("send") {
                let msg = msg
                    .as_str()
                    .ok_or_else(|| bad(format!("decisions[{k}].send must be a string")))?;
                let index = match tree.node_at(&path).map(|n| &**n) {
                    Some(Node::Send { branches, .. }) => {
                        branches.iter().position(|b| b.msg == msg).ok_or_else(|| {
                            Error::ScriptMismatch(format!("no message {msg:?} at {path:?}"))
                        })?
                    }
                    _ => return Err(Error::ScriptMismatch(format!("no send node at {path:?}"))),
                };
                Decision::Send(index)
            } else if let Some(q) = item.get("alice_wins") {
                Decision::Force(Prob::new(scalar_from_json::<T>(q)?)?)
            } else {
                return Err(bad(format!(
                    "decisions[{k}] needs \"send\" or \"alice_wins\""
                )));
            };
            script.decisions.insert(path, decision);
        }
        Ok(script)
    }
}
