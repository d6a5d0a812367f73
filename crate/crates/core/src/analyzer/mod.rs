//! Exact honest distributions and optimal forcing probabilities.
//!
//! [`analyze`] runs a single post-order pass over the tree. At a send node
//! the honest quantities and the non-sender's forcing values are averaged
//! over the sender's distribution, while the sender's forcing values take
//! the best branch. At a weak-coin-flip node each cheater picks the better
//! endpoint of the interval it can steer Pr[Alice wins] to.
//!
//! [`brute_force_analyze`] recomputes the same numbers by enumerating every
//! deterministic adversary strategy and serves as an independent check.

mod oracle;
mod verify;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::prob::{Prob, Scalar};
use crate::script::{AdversaryScript, Decision};
use crate::tree::{validate_tree, Node, Path, ProtocolTree};
use crate::types::{AnalysisResult, Outcome, Party};

pub use oracle::{
    brute_force_analyze, brute_force_analyze_with_limit, diff_results, strategy_count,
    DEFAULT_STRATEGY_LIMIT,
};
pub use verify::{verify_implements, Check, VerificationReport};

/// All six quantities of one subtree plus its abort probability.
#[derive(Debug, Clone)]
struct Values<T> {
    p00: T,
    p11: T,
    abort: T,
    fa0: T,
    fa1: T,
    fb0: T,
    fb1: T,
}

impl<T: Scalar> Values<T> {
    fn leaf(o: Outcome) -> Self {
        let (zero, one) = (T::zero(), T::one());
        let pick = |hit: bool| if hit { one.clone() } else { zero.clone() };
        let is0 = o == Outcome::Zero;
        let is1 = o == Outcome::One;
        Values {
            p00: pick(is0),
            p11: pick(is1),
            abort: pick(o == Outcome::Abort),
            fa0: pick(is0),
            fa1: pick(is1),
            fb0: pick(is0),
            fb1: pick(is1),
        }
    }

    fn force(&self, cheater: Party, target: u8) -> &T {
        match (cheater, target) {
            (Party::Alice, 0) => &self.fa0,
            (Party::Alice, _) => &self.fa1,
            (Party::Bob, 0) => &self.fb0,
            (Party::Bob, _) => &self.fb1,
        }
    }

    fn force_mut(&mut self, cheater: Party, target: u8) -> &mut T {
        match (cheater, target) {
            (Party::Alice, 0) => &mut self.fa0,
            (Party::Alice, _) => &mut self.fa1,
            (Party::Bob, 0) => &mut self.fb0,
            (Party::Bob, _) => &mut self.fb1,
        }
    }

    fn into_result(self) -> Result<AnalysisResult<T>> {
        Ok(AnalysisResult {
            p00: Prob::from_computed(self.p00)?,
            p11: Prob::from_computed(self.p11)?,
            abort: Prob::from_computed(self.abort)?,
            force_a0: Prob::from_computed(self.fa0)?,
            force_a1: Prob::from_computed(self.fa1)?,
            force_b0: Prob::from_computed(self.fb0)?,
            force_b1: Prob::from_computed(self.fb1)?,
        })
    }
}

/// Index and value of the maximum. A later candidate replaces the current
/// best only if it exceeds it by more than the mode's tie slack.
fn argmax<T: Scalar>(candidates: impl IntoIterator<Item = T>) -> (usize, T) {
    let mut it = candidates.into_iter().enumerate();
    let (mut best_i, mut best) = it.next().expect("argmax over an empty set");
    for (i, v) in it {
        if v > best.clone() + T::tie_slack() {
            best_i = i;
            best = v;
        }
    }
    (best_i, best)
}

fn wcf_endpoints<T: Scalar>(spec: &crate::types::WcfSpec<T>, cheater: Party) -> [T; 2] {
    let (lo, hi) = spec.steerable_range(cheater);
    [lo, hi]
}

fn mix<T: Scalar>(q: &T, a: &T, b: &T) -> T {
    q.clone() * a.clone() + (T::one() - q.clone()) * b.clone()
}

type Memo<T> = HashMap<*const Node<T>, Values<T>>;

fn evaluate<T: Scalar>(node: &Node<T>, memo: &mut Memo<T>) -> Values<T> {
    let key = node as *const Node<T>;
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let out = match node {
        Node::Leaf(o) => Values::leaf(*o),
        Node::Send { sender, branches } => {
            let kids: Vec<Values<T>> = branches.iter().map(|b| evaluate(&b.child, memo)).collect();
            let avg = |get: &dyn Fn(&Values<T>) -> &T| {
                branches
                    .iter()
                    .zip(&kids)
                    .fold(T::zero(), |acc, (b, v)| acc + b.prob.get() * get(v).clone())
            };
            let mut v = Values {
                p00: avg(&|v| &v.p00),
                p11: avg(&|v| &v.p11),
                abort: avg(&|v| &v.abort),
                fa0: T::zero(),
                fa1: T::zero(),
                fb0: T::zero(),
                fb1: T::zero(),
            };
            let other = sender.other();
            for target in [0u8, 1] {
                *v.force_mut(*sender, target) =
                    argmax(kids.iter().map(|k| k.force(*sender, target).clone())).1;
                *v.force_mut(other, target) = avg(&|k| k.force(other, target));
            }
            v
        }
        Node::Wcf {
            spec,
            alice_wins,
            bob_wins,
        } => {
            let a = evaluate(alice_wins, memo);
            let b = evaluate(bob_wins, memo);
            let z = spec.z.get();
            let mut v = Values {
                p00: mix(&z, &a.p00, &b.p00),
                p11: mix(&z, &a.p11, &b.p11),
                abort: mix(&z, &a.abort, &b.abort),
                fa0: T::zero(),
                fa1: T::zero(),
                fb0: T::zero(),
                fb1: T::zero(),
            };
            for cheater in [Party::Alice, Party::Bob] {
                let qs = wcf_endpoints(spec, cheater);
                for target in [0u8, 1] {
                    let (va, vb) = (a.force(cheater, target), b.force(cheater, target));
                    *v.force_mut(cheater, target) = argmax(qs.iter().map(|q| mix(q, va, vb))).1;
                }
            }
            v
        }
    };
    memo.insert(key, out.clone());
    out
}

fn ensure_well_formed<T: Scalar>(tree: &ProtocolTree<T>) -> Result<()> {
    let report = validate_tree(tree);
    if report.is_well_formed() {
        Ok(())
    } else {
        Err(Error::MalformedTree(report.to_string()))
    }
}

/// Honest output distribution and the four optimal forcing probabilities.
pub fn analyze<T: Scalar>(tree: &ProtocolTree<T>) -> Result<AnalysisResult<T>> {
    ensure_well_formed(tree)?;
    evaluate(&tree.root, &mut HashMap::new()).into_result()
}

/// A deterministic strategy for `cheater` that makes the honest party output
/// `target` with the optimal probability, together with that probability.
///
/// Ties go to the first branch (or the lower endpoint at a weak-coin-flip
/// node).
pub fn extract_optimal_script<T: Scalar>(
    tree: &ProtocolTree<T>,
    cheater: Party,
    target: u8,
) -> Result<(AdversaryScript<T>, Prob<T>)> {
    ensure_well_formed(tree)?;
    let mut memo = HashMap::new();
    let value = evaluate(&tree.root, &mut memo)
        .force(cheater, target)
        .clone();
    let mut script = AdversaryScript::new(cheater);
    let mut stack: Vec<(&Node<T>, Path)> = vec![(&tree.root, Vec::new())];
    while let Some((node, path)) = stack.pop() {
        match node {
            Node::Leaf(_) => {}
            Node::Send { sender, branches } if *sender == cheater => {
                let (i, _) = argmax(
                    branches
                        .iter()
                        .map(|b| evaluate(&b.child, &mut memo).force(cheater, target).clone()),
                );
                let mut child_path = path.clone();
                child_path.push(i);
                script.decisions.insert(path, Decision::Send(i));
                stack.push((&branches[i].child, child_path));
            }
            Node::Send { branches, .. } => {
                for (i, b) in branches.iter().enumerate() {
                    let mut child_path = path.clone();
                    child_path.push(i);
                    stack.push((&b.child, child_path));
                }
            }
            Node::Wcf {
                spec,
                alice_wins,
                bob_wins,
            } => {
                let va = evaluate(alice_wins, &mut memo)
                    .force(cheater, target)
                    .clone();
                let vb = evaluate(bob_wins, &mut memo).force(cheater, target).clone();
                let qs = wcf_endpoints(spec, cheater);
                let (k, _) = argmax(qs.iter().map(|q| mix(q, &va, &vb)));
                let q = Prob::from_computed(qs[k].clone())?;
                for (i, child) in [alice_wins, bob_wins].into_iter().enumerate() {
                    let mut child_path = path.clone();
                    child_path.push(i);
                    stack.push((child, child_path));
                }
                script.decisions.insert(path, Decision::Force(q));
            }
        }
    }
    Ok((script, Prob::from_computed(value)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Exact;
    use crate::types::WcfSpec;

    fn q(n: i64, d: i64) -> Prob<Exact> {
        Prob::ratio(n, d).unwrap()
    }

    fn leaf(o: Outcome) -> crate::tree::NodeRef<Exact> {
        Node::leaf(o)
    }

    /// Alice announces a uniformly random bit; Bob accepts it.
    fn announce() -> ProtocolTree<Exact> {
        let accept = |o: Outcome, label: &str| {
            Node::send(Party::Bob, [(label.to_string(), q(1, 1), leaf(o))])
        };
        ProtocolTree::new(Node::send(
            Party::Alice,
            [
                ("0", q(1, 2), accept(Outcome::Zero, "ok")),
                ("1", q(1, 2), accept(Outcome::One, "ok")),
            ],
        ))
    }

    #[test]
    fn leaf_base_cases() {
        let r = analyze(&ProtocolTree::<Exact>::leaf(Outcome::Zero)).unwrap();
        assert_eq!(r.p00, q(1, 1));
        assert_eq!((r.force_a0.clone(), r.force_b0.clone()), (q(1, 1), q(1, 1)));
        assert_eq!((r.force_a1.clone(), r.force_b1.clone()), (q(0, 1), q(0, 1)));

        let r = analyze(&ProtocolTree::<Exact>::leaf(Outcome::Abort)).unwrap();
        assert_eq!(r.abort, q(1, 1));
        assert!(r.fields()[3..]
            .iter()
            .all(|(_, v)| v.value().is_zero_value()));
    }

    #[test]
    fn sender_maximises_and_receiver_averages() {
        let r = analyze(&announce()).unwrap();
        assert_eq!(
            (r.p00.clone(), r.p11.clone(), r.abort.clone()),
            (q(1, 2), q(1, 2), q(0, 1))
        );
        assert_eq!((r.force_a0, r.force_a1), (q(1, 1), q(1, 1)));
        assert_eq!((r.force_b0, r.force_b1), (q(1, 2), q(1, 2)));
    }

    #[test]
    fn wcf_node_endpoints() {
        let t = ProtocolTree::new(Node::wcf(
            WcfSpec::new(q(1, 4), q(1, 10)),
            leaf(Outcome::Zero),
            leaf(Outcome::One),
        ));
        let r = analyze(&t).unwrap();
        assert_eq!(r.p00, q(1, 4));
        assert_eq!(r.force_a0, q(7, 20));
        assert_eq!(r.force_a1, q(1, 1));
        assert_eq!(r.force_b0, q(1, 1));
        assert_eq!(r.force_b1, q(17, 20));
    }

    #[test]
    fn malformed_tree_is_rejected() {
        let t = ProtocolTree::new(Node::send(
            Party::Alice,
            [("0", q(1, 2), leaf(Outcome::Zero))],
        ));
        assert!(matches!(analyze(&t), Err(Error::MalformedTree(_))));
    }

    #[test]
    fn optimal_script_reaches_the_optimum() {
        let (script, value) = extract_optimal_script(&announce(), Party::Alice, 1).unwrap();
        assert_eq!(value, q(1, 1));
        assert_eq!(script.decisions.get(&vec![]), Some(&Decision::Send(1)));
        script.validate(&announce()).unwrap();
    }

    #[test]
    fn ties_go_to_the_first_branch() {
        assert_eq!(argmax([0.5f64, 0.5 + 1e-13, 0.4]).0, 0);
        assert_eq!(argmax([0.5f64, 0.6, 0.6]).0, 1);
    }
}
