//! Brute-force enumeration of deterministic adversary strategies.

use crate::error::{Error, Result};
use crate::prob::{Prob, Scalar};
use crate::tree::{validate_tree, Node, ProtocolTree};
use crate::types::{AnalysisResult, Outcome, Party};

pub const DEFAULT_STRATEGY_LIMIT: u128 = 100_000;

/// One position of the tree with shared subtrees expanded.
enum Pos<T> {
    Leaf(Outcome),
    Send {
        sender: Party,
        probs: Vec<T>,
        children: Vec<usize>,
    },
    Wcf {
        z: T,
        alice: [T; 2],
        bob: [T; 2],
        children: [usize; 2],
    },
}

fn flatten<T: Scalar>(node: &Node<T>, out: &mut Vec<Pos<T>>) -> usize {
    let id = out.len();
    out.push(Pos::Leaf(Outcome::Abort));
    let pos = match node {
        Node::Leaf(o) => Pos::Leaf(*o),
        Node::Send { sender, branches } => Pos::Send {
            sender: *sender,
            probs: branches.iter().map(|b| b.prob.get()).collect(),
            children: branches.iter().map(|b| flatten(&b.child, out)).collect(),
        },
        Node::Wcf {
            spec,
            alice_wins,
            bob_wins,
        } => {
            let (a_lo, a_hi) = spec.steerable_range(Party::Alice);
            let (b_lo, b_hi) = spec.steerable_range(Party::Bob);
            Pos::Wcf {
                z: spec.z.get(),
                alice: [a_lo, a_hi],
                bob: [b_lo, b_hi],
                children: [flatten(alice_wins, out), flatten(bob_wins, out)],
            }
        }
    };
    out[id] = pos;
    id
}

fn count<T>(positions: &[Pos<T>], at: usize, cheater: Party) -> u128 {
    match &positions[at] {
        Pos::Leaf(_) => 1,
        Pos::Send {
            sender, children, ..
        } if *sender == cheater => children.iter().fold(0u128, |acc, &c| {
            acc.saturating_add(count(positions, c, cheater))
        }),
        Pos::Send { children, .. } => children.iter().fold(1u128, |acc, &c| {
            acc.saturating_mul(count(positions, c, cheater))
        }),
        Pos::Wcf { children, .. } => children.iter().fold(2u128, |acc, &c| {
            acc.saturating_mul(count(positions, c, cheater))
        }),
    }
}

/// Number of deterministic strategies of `cheater` the oracle would visit.
pub fn strategy_count<T: Scalar>(tree: &ProtocolTree<T>, cheater: Party) -> u128 {
    let mut positions = Vec::new();
    flatten(&tree.root, &mut positions);
    count(&positions, 0, cheater)
}

/// Output distribution `[zero, one, abort]` when `cheater` follows `choice`
/// (branch index at its send nodes, endpoint index at weak-coin-flip nodes).
fn sweep<T: Scalar>(positions: &[Pos<T>], cheater: Option<Party>, choice: &[usize]) -> [T; 3] {
    let mut dist = [T::zero(), T::zero(), T::zero()];
    let mut work = vec![(0usize, T::one())];
    while let Some((at, w)) = work.pop() {
        if w.is_zero_value() {
            continue;
        }
        match &positions[at] {
            Pos::Leaf(o) => {
                let slot = match o {
                    Outcome::Zero => 0,
                    Outcome::One => 1,
                    Outcome::Abort => 2,
                };
                dist[slot] = dist[slot].clone() + w;
            }
            Pos::Send {
                sender, children, ..
            } if Some(*sender) == cheater => work.push((children[choice[at]], w)),
            Pos::Send {
                probs, children, ..
            } => {
                for (p, &c) in probs.iter().zip(children) {
                    work.push((c, w.clone() * p.clone()));
                }
            }
            Pos::Wcf {
                z,
                alice,
                bob,
                children,
            } => {
                let q = match cheater {
                    None => z.clone(),
                    Some(Party::Alice) => alice[choice[at]].clone(),
                    Some(Party::Bob) => bob[choice[at]].clone(),
                };
                work.push((children[0], w.clone() * q.clone()));
                work.push((children[1], w * (T::one() - q)));
            }
        }
    }
    dist
}

fn enumerate<T>(
    positions: &[Pos<T>],
    cheater: Party,
    pending: &mut Vec<usize>,
    choice: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    let Some(at) = pending.pop() else {
        visit(choice);
        return;
    };
    let mark = pending.len();
    match &positions[at] {
        Pos::Leaf(_) => enumerate(positions, cheater, pending, choice, visit),
        Pos::Send {
            sender, children, ..
        } if *sender == cheater => {
            for (i, &c) in children.iter().enumerate() {
                choice[at] = i;
                pending.push(c);
                enumerate(positions, cheater, pending, choice, visit);
                pending.truncate(mark);
            }
        }
        Pos::Send { children, .. } => {
            pending.extend(children);
            enumerate(positions, cheater, pending, choice, visit);
            pending.truncate(mark);
        }
        Pos::Wcf { children, .. } => {
            for k in 0..2 {
                choice[at] = k;
                pending.extend(children);
                enumerate(positions, cheater, pending, choice, visit);
                pending.truncate(mark);
            }
        }
    }
    pending.push(at);
}

/// [`brute_force_analyze_with_limit`] with [`DEFAULT_STRATEGY_LIMIT`].
pub fn brute_force_analyze<T: Scalar>(tree: &ProtocolTree<T>) -> Result<AnalysisResult<T>> {
    brute_force_analyze_with_limit(tree, DEFAULT_STRATEGY_LIMIT)
}

/// Recomputes [`super::analyze`] by trying every deterministic strategy of
/// each cheater and keeping the best outcome per target.
pub fn brute_force_analyze_with_limit<T: Scalar>(
    tree: &ProtocolTree<T>,
    limit: u128,
) -> Result<AnalysisResult<T>> {
    let report = validate_tree(tree);
    if !report.is_well_formed() {
        return Err(Error::MalformedTree(report.to_string()));
    }
    let mut positions = Vec::new();
    flatten(&tree.root, &mut positions);
    for cheater in [Party::Alice, Party::Bob] {
        let n = count(&positions, 0, cheater);
        if n > limit {
            return Err(Error::ExplosionGuard { count: n, limit });
        }
    }

    let mut choice = vec![0usize; positions.len()];
    let [p00, p11, abort] = sweep(&positions, None, &choice);
    let mut best = [[T::zero(), T::zero()], [T::zero(), T::zero()]];
    for (k, cheater) in [Party::Alice, Party::Bob].into_iter().enumerate() {
        let slot = &mut best[k];
        let mut visit = |c: &[usize]| {
            let [d0, d1, _] = sweep(&positions, Some(cheater), c);
            slot[0] = slot[0].clone().max_of(d0);
            slot[1] = slot[1].clone().max_of(d1);
        };
        enumerate(&positions, cheater, &mut vec![0], &mut choice, &mut visit);
    }
    let [[a0, a1], [b0, b1]] = best;
    Ok(AnalysisResult {
        p00: Prob::from_computed(p00)?,
        p11: Prob::from_computed(p11)?,
        abort: Prob::from_computed(abort)?,
        force_a0: Prob::from_computed(a0)?,
        force_a1: Prob::from_computed(a1)?,
        force_b0: Prob::from_computed(b0)?,
        force_b1: Prob::from_computed(b1)?,
    })
}

/// Fields on which two results differ beyond the mode tolerance, as
/// `(name, left, right)`.
pub fn diff_results<T: Scalar>(
    left: &AnalysisResult<T>,
    right: &AnalysisResult<T>,
) -> Vec<(&'static str, T, T)> {
    left.fields()
        .into_iter()
        .zip(right.fields())
        .filter(|((_, a), (_, b))| !a.value().approx_eq(b.value()))
        .map(|((name, a), (_, b))| (name, a.get(), b.get()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::analyze;
    use crate::prob::Exact;
    use crate::types::WcfSpec;

    fn q(n: i64, d: i64) -> Prob<Exact> {
        Prob::ratio(n, d).unwrap()
    }

    fn sample() -> ProtocolTree<Exact> {
        let inner = Node::send(
            Party::Bob,
            [
                ("a", q(1, 3), Node::leaf(Outcome::Zero)),
                ("b", q(2, 3), Node::leaf(Outcome::Abort)),
            ],
        );
        ProtocolTree::new(Node::send(
            Party::Alice,
            [
                ("x", q(1, 4), inner.clone()),
                (
                    "y",
                    q(3, 4),
                    Node::wcf(
                        WcfSpec::new(q(1, 2), q(1, 8)),
                        inner,
                        Node::leaf(Outcome::One),
                    ),
                ),
            ],
        ))
    }

    #[test]
    fn abort_leaf() {
        let r = brute_force_analyze(&ProtocolTree::<Exact>::leaf(Outcome::Abort)).unwrap();
        assert_eq!(r.abort, q(1, 1));
        assert_eq!(r.force_a0, q(0, 1));
    }

    #[test]
    fn matches_recursion_on_a_shared_tree() {
        let t = sample();
        assert_eq!(brute_force_analyze(&t).unwrap(), analyze(&t).unwrap());
    }

    #[test]
    fn counts_strategies() {
        let t = sample();
        // Alice: branch x, or branch y with two endpoints.
        assert_eq!(strategy_count(&t, Party::Alice), 3);
        // Bob: two replies under x, times two endpoints and two replies under y.
        assert_eq!(strategy_count(&t, Party::Bob), 8);
    }

    #[test]
    fn explosion_guard() {
        let err = brute_force_analyze_with_limit(&sample(), 4).unwrap_err();
        assert!(matches!(err, Error::ExplosionGuard { count: 8, limit: 4 }));
    }
}
