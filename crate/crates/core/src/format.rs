//! The `cf-tree/1` JSON file format.
//!
//! ```text
//! {"format":"cf-tree/1","root":Node}
//! Node := {"kind":"send","sender":"alice"|"bob","branches":[{"msg":..,"prob":P,"child":Node},..]}
//!       | {"kind":"wcf","z":P,"eps":P,"alice_wins":Node,"bob_wins":Node}
//!       | {"kind":"leaf","output":"0"|"1"|"abort"}
//! P    := JSON number | "a/b"
//! ```
//!
//! Rational-mode trees are written with `"a/b"` strings, float-mode trees
//! with JSON numbers. Either form is accepted on input in both modes.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::prob::{scalar_from_json, Prob, Scalar};
use crate::tree::{Node, NodeRef, ProtocolTree};
use crate::types::{Outcome, Party, WcfSpec};

pub const FORMAT_TAG: &str = "cf-tree/1";

pub fn tree_to_json<T: Scalar>(tree: &ProtocolTree<T>) -> Value {
    json!({ "format": FORMAT_TAG, "root": node_to_json(&tree.root) })
}

fn node_to_json<T: Scalar>(node: &Node<T>) -> Value {
    match node {
        Node::Send { sender, branches } => json!({
            "kind": "send",
            "sender": sender.as_str(),
            "branches": branches.iter().map(|b| json!({
                "msg": b.msg,
                "prob": b.prob.value().to_wire(),
                "child": node_to_json(&b.child),
            })).collect::<Vec<_>>(),
        }),
        Node::Wcf {
            spec,
            alice_wins,
            bob_wins,
        } => json!({
            "kind": "wcf",
            "z": spec.z.value().to_wire(),
            "eps": spec.eps.value().to_wire(),
            "alice_wins": node_to_json(alice_wins),
            "bob_wins": node_to_json(bob_wins),
        }),
        Node::Leaf(o) => json!({ "kind": "leaf", "output": o.as_str() }),
    }
}

pub fn tree_to_string<T: Scalar>(tree: &ProtocolTree<T>) -> String {
    let mut s = serde_json::to_string_pretty(&tree_to_json(tree)).expect("tree json");
    s.push('\n');
    s
}

/// Parses a `cf-tree/1` document. Structural errors name the JSON path of
/// the offending value; syntax errors carry serde's line and column.
pub fn tree_from_str<T: Scalar>(text: &str) -> Result<ProtocolTree<T>> {
    let value: Value = serde_json::from_str(text)?;
    tree_from_json(&value)
}

pub fn tree_from_json<T: Scalar>(value: &Value) -> Result<ProtocolTree<T>> {
    let obj = as_object(value, "$")?;
    match obj.get("format") {
        Some(Value::String(tag)) if tag == FORMAT_TAG => {}
        Some(other) => {
            return Err(at(
                "$.format",
                format!("expected \"{FORMAT_TAG}\", found {other}"),
            ))
        }
        None => return Err(at("$", "missing \"format\"")),
    }
    let root = field(obj, "root", "$")?;
    Ok(ProtocolTree::new(node_from_json(root, "$.root")?))
}

fn node_from_json<T: Scalar>(value: &Value, path: &str) -> Result<NodeRef<T>> {
    let obj = as_object(value, path)?;
    let kind = string_field(obj, "kind", path)?;
    match kind {
        "leaf" => {
            let output: Outcome = string_field(obj, "output", path)?
                .parse()
                .map_err(|e: Error| at(&format!("{path}.output"), e.to_string()))?;
            Ok(Node::leaf(output))
        }
        "send" => {
            let sender: Party = string_field(obj, "sender", path)?
                .parse()
                .map_err(|e: Error| at(&format!("{path}.sender"), e.to_string()))?;
            let branches_path = format!("{path}.branches");
            let list = match field(obj, "branches", path)? {
                Value::Array(items) => items,
                other => {
                    return Err(at(
                        &branches_path,
                        format!("expected an array, found {other}"),
                    ))
                }
            };
            let mut branches = Vec::with_capacity(list.len());
            for (i, item) in list.iter().enumerate() {
                let bpath = format!("{branches_path}[{i}]");
                let bobj = as_object(item, &bpath)?;
                let msg = string_field(bobj, "msg", &bpath)?.to_string();
                let prob = prob_field::<T>(bobj, "prob", &bpath)?;
                let child =
                    node_from_json(field(bobj, "child", &bpath)?, &format!("{bpath}.child"))?;
                branches.push((msg, prob, child));
            }
            Ok(Node::send(sender, branches))
        }
        "wcf" => {
            let z = prob_field::<T>(obj, "z", path)?;
            let eps = prob_field::<T>(obj, "eps", path)?;
            let a = node_from_json(
                field(obj, "alice_wins", path)?,
                &format!("{path}.alice_wins"),
            )?;
            let b = node_from_json(field(obj, "bob_wins", path)?, &format!("{path}.bob_wins"))?;
            Ok(Node::wcf(WcfSpec::new(z, eps), a, b))
        }
        other => Err(at(
            &format!("{path}.kind"),
            format!("unknown node kind {other:?} (expected send, wcf or leaf)"),
        )),
    }
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn as_object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| at(path, format!("expected an object, found {value}")))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| at(path, format!("missing \"{name}\"")))
}

fn string_field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a str> {
    match field(obj, name, path)? {
        Value::String(s) => Ok(s),
        other => Err(at(
            &format!("{path}.{name}"),
            format!("expected a string, found {other}"),
        )),
    }
}

fn prob_field<T: Scalar>(obj: &Map<String, Value>, name: &str, path: &str) -> Result<Prob<T>> {
    let fpath = format!("{path}.{name}");
    let v = scalar_from_json::<T>(field(obj, name, path)?).map_err(|e| at(&fpath, e))?;
    Prob::new(v).map_err(|e| at(&fpath, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Exact;

    const SAMPLE: &str = r#"{
      "format": "cf-tree/1",
      "root": {"kind": "send", "sender": "alice", "branches": [
        {"msg": "0", "prob": "1/2", "child": {"kind": "leaf", "output": "0"}},
        {"msg": "1", "prob": 0.5, "child": {"kind": "wcf", "z": "1/3", "eps": 0,
           "alice_wins": {"kind": "leaf", "output": "1"},
           "bob_wins": {"kind": "leaf", "output": "abort"}}}
      ]}
    }"#;

    #[test]
    fn reads_mixed_literals_exactly() {
        let t: ProtocolTree<Exact> = tree_from_str(SAMPLE).unwrap();
        let Node::Send { branches, .. } = &*t.root else {
            panic!()
        };
        assert_eq!(branches[1].prob.get(), Exact::from_ratio(1, 2));
        let text = tree_to_string(&t);
        assert!(text.contains("\"1/3\""));
        let back: ProtocolTree<Exact> = tree_from_str(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn reads_float_mode() {
        let t: ProtocolTree<f64> = tree_from_str(SAMPLE).unwrap();
        let back: ProtocolTree<f64> = tree_from_str(&tree_to_string(&t)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn structural_errors_name_the_path() {
        let bad = SAMPLE.replace("\"abort\"", "\"maybe\"");
        let err = tree_from_str::<Exact>(&bad).unwrap_err().to_string();
        assert!(
            err.contains("$.root.branches[1].child.bob_wins.output"),
            "{err}"
        );

        let bad = SAMPLE.replace("\"1/3\"", "\"4/3\"");
        let err = tree_from_str::<Exact>(&bad).unwrap_err().to_string();
        assert!(err.contains("$.root.branches[1].child.z"), "{err}");

        let bad = SAMPLE.replace("cf-tree/1", "cf-tree/2");
        assert!(tree_from_str::<Exact>(&bad).is_err());
    }

    #[test]
    fn syntax_errors_carry_line() {
        let err = tree_from_str::<Exact>("{\n  \"format\": ,\n}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }
}
