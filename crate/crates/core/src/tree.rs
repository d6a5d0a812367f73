//! Finite protocol trees.
//!
//! A tree describes every transcript of a two-party protocol. Send nodes
//! carry the honest sender's message distribution, weak-coin-flip nodes
//! stand for an ideal resource, and leaves carry the common output. Subtrees
//! are reference counted and may be shared.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::prob::{Prob, Scalar};
use crate::types::{Outcome, Party, WcfSpec};

pub type NodeRef<T> = Arc<Node<T>>;

/// Path from the root: the index of the branch taken at each node. At a
/// weak-coin-flip node, 0 is the Alice-wins child and 1 the Bob-wins child.
pub type Path = Vec<usize>;

/// Rebuilds a node from its already rewritten children.
type Rebuild<'a, T> = dyn FnMut(&Node<T>, Vec<NodeRef<T>>) -> NodeRef<T> + 'a;

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub msg: String,
    pub prob: Prob<T>,
    pub child: NodeRef<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node<T> {
    Send {
        sender: Party,
        branches: Vec<Branch<T>>,
    },
    Wcf {
        spec: WcfSpec<T>,
        alice_wins: NodeRef<T>,
        bob_wins: NodeRef<T>,
    },
    Leaf(Outcome),
}

impl<T: Scalar> Node<T> {
    pub fn leaf(output: Outcome) -> NodeRef<T> {
        Arc::new(Node::Leaf(output))
    }

    pub fn send<S: Into<String>>(
        sender: Party,
        branches: impl IntoIterator<Item = (S, Prob<T>, NodeRef<T>)>,
    ) -> NodeRef<T> {
        Arc::new(Node::Send {
            sender,
            branches: branches
                .into_iter()
                .map(|(msg, prob, child)| Branch {
                    msg: msg.into(),
                    prob,
                    child,
                })
                .collect(),
        })
    }

    /// Like [`Node::send`] but drops branches the honest sender never takes.
    /// A single surviving branch keeps probability 1.
    pub fn send_pruned<S: Into<String>>(
        sender: Party,
        branches: impl IntoIterator<Item = (S, Prob<T>, NodeRef<T>)>,
    ) -> NodeRef<T> {
        Node::send(
            sender,
            branches
                .into_iter()
                .filter(|(_, prob, _)| !prob.value().is_zero_value()),
        )
    }

    pub fn wcf(spec: WcfSpec<T>, alice_wins: NodeRef<T>, bob_wins: NodeRef<T>) -> NodeRef<T> {
        Arc::new(Node::Wcf {
            spec,
            alice_wins,
            bob_wins,
        })
    }

    /// Children in path-index order.
    pub fn children(&self) -> Vec<&NodeRef<T>> {
        match self {
            Node::Send { branches, .. } => branches.iter().map(|b| &b.child).collect(),
            Node::Wcf {
                alice_wins,
                bob_wins,
                ..
            } => vec![alice_wins, bob_wins],
            Node::Leaf(_) => Vec::new(),
        }
    }
}

/// A protocol, given by its root node.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTree<T> {
    pub root: NodeRef<T>,
}

impl<T: Scalar> ProtocolTree<T> {
    pub fn new(root: NodeRef<T>) -> Self {
        ProtocolTree { root }
    }

    pub fn leaf(output: Outcome) -> Self {
        ProtocolTree::new(Node::leaf(output))
    }

    /// Number of node positions, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        fn go<T: Scalar>(n: &Node<T>) -> usize {
            1 + n.children().into_iter().map(|c| go(c)).sum::<usize>()
        }
        go(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn go<T: Scalar>(n: &Node<T>) -> usize {
            n.children()
                .into_iter()
                .map(|c| 1 + go(c))
                .max()
                .unwrap_or(0)
        }
        go(&self.root)
    }

    /// Number of weak-coin-flip positions in the tree.
    pub fn wcf_count(&self) -> usize {
        fn go<T: Scalar>(n: &Node<T>) -> usize {
            let own = usize::from(matches!(n, Node::Wcf { .. }));
            own + n.children().into_iter().map(|c| go(c)).sum::<usize>()
        }
        go(&self.root)
    }

    /// Node at `path`, if it exists.
    pub fn node_at(&self, path: &[usize]) -> Option<&NodeRef<T>> {
        let mut node = &self.root;
        for &i in path {
            node = *node.children().get(i)?;
        }
        Some(node)
    }

    /// Rebuilds the tree bottom-up, replacing each leaf by `f(leaf)`.
    /// Shared subtrees stay shared.
    pub fn map_leaves(&self, f: &mut dyn FnMut(Outcome) -> NodeRef<T>) -> Self {
        self.rewrite(&mut |node, children| match node {
            Node::Leaf(o) => f(*o),
            _ => rebuild(node, children),
        })
    }

    /// Exchanges the roles of Alice and Bob. Outputs keep their values.
    pub fn swap_parties(&self) -> Self {
        self.rewrite(&mut |node, children| match node {
            Node::Send { sender, branches } => Arc::new(Node::Send {
                sender: sender.other(),
                branches: branches
                    .iter()
                    .zip(children)
                    .map(|(b, child)| Branch {
                        msg: b.msg.clone(),
                        prob: b.prob.clone(),
                        child,
                    })
                    .collect(),
            }),
            Node::Wcf { spec, .. } => {
                let mut it = children.into_iter();
                let alice_wins = it.next().expect("wcf has two children");
                let bob_wins = it.next().expect("wcf has two children");
                Node::wcf(spec.swapped(), bob_wins, alice_wins)
            }
            Node::Leaf(o) => Node::leaf(*o),
        })
    }

    /// Renames output 0 to 1 and vice versa. Parties and messages are unchanged.
    pub fn swap_outputs(&self) -> Self {
        self.map_leaves(&mut |o| Node::leaf(o.flipped()))
    }

    /// Replaces the bias allowance of every weak-coin-flip node by `eps`.
    pub fn with_wcf_eps(&self, eps: &Prob<T>) -> Self {
        self.rewrite(&mut |node, children| match node {
            Node::Wcf { spec, .. } => {
                let mut it = children.into_iter();
                let a = it.next().expect("wcf has two children");
                let b = it.next().expect("wcf has two children");
                Node::wcf(WcfSpec::new(spec.z.clone(), eps.clone()), a, b)
            }
            _ => rebuild(node, children),
        })
    }

    /// Post-order rewrite with memoisation on node identity.
    fn rewrite(&self, f: &mut Rebuild<'_, T>) -> Self {
        fn go<T: Scalar>(
            node: &NodeRef<T>,
            f: &mut Rebuild<'_, T>,
            memo: &mut HashMap<*const Node<T>, NodeRef<T>>,
        ) -> NodeRef<T> {
            let key = Arc::as_ptr(node);
            if let Some(done) = memo.get(&key) {
                return done.clone();
            }
            let children = node
                .children()
                .into_iter()
                .map(|c| go(c, f, memo))
                .collect();
            let out = f(node, children);
            memo.insert(key, out.clone());
            out
        }
        let mut memo = HashMap::new();
        ProtocolTree::new(go(&self.root, f, &mut memo))
    }
}

fn rebuild<T: Scalar>(node: &Node<T>, children: Vec<NodeRef<T>>) -> NodeRef<T> {
    match node {
        Node::Send { sender, branches } => Arc::new(Node::Send {
            sender: *sender,
            branches: branches
                .iter()
                .zip(children)
                .map(|(b, child)| Branch {
                    msg: b.msg.clone(),
                    prob: b.prob.clone(),
                    child,
                })
                .collect(),
        }),
        Node::Wcf { spec, .. } => {
            let mut it = children.into_iter();
            let a = it.next().expect("wcf has two children");
            let b = it.next().expect("wcf has two children");
            Node::wcf(spec.clone(), a, b)
        }
        Node::Leaf(o) => Node::leaf(*o),
    }
}

/// One problem found by [`validate_tree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub path: Path,
    pub message: String,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at node path {:?}", self.message, self.path)
    }
}

/// Result of a well-formedness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellFormedness {
    pub defects: Vec<Defect>,
    pub node_count: usize,
    pub depth: usize,
    pub wcf_nodes: usize,
}

impl WellFormedness {
    pub fn is_well_formed(&self) -> bool {
        self.defects.is_empty()
    }
}

impl fmt::Display for WellFormedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.defects.is_empty() {
            write!(
                f,
                "well-formed ({} nodes, depth {}, {} weak-coin-flip nodes)",
                self.node_count, self.depth, self.wcf_nodes
            )
        } else {
            let list: Vec<String> = self.defects.iter().map(|d| d.to_string()).collect();
            write!(f, "{} defect(s): {}", self.defects.len(), list.join("; "))
        }
    }
}

/// Checks branch sums, arity and sibling-label uniqueness at every node.
///
/// Trees built from `Arc` children are acyclic, so finiteness holds by
/// construction.
pub fn validate_tree<T: Scalar>(tree: &ProtocolTree<T>) -> WellFormedness {
    fn go<T: Scalar>(node: &Node<T>, path: &mut Path, defects: &mut Vec<Defect>) {
        if let Node::Send { branches, .. } = node {
            if branches.is_empty() {
                defects.push(Defect {
                    path: path.clone(),
                    message: "send node without branches".into(),
                });
            } else {
                let sum = branches.iter().fold(T::zero(), |acc, b| acc + b.prob.get());
                if !sum.approx_eq(&T::one()) {
                    defects.push(Defect {
                        path: path.clone(),
                        message: format!("branch sum {sum}"),
                    });
                }
                let mut seen = BTreeSet::new();
                for b in branches {
                    if !seen.insert(b.msg.as_str()) {
                        defects.push(Defect {
                            path: path.clone(),
                            message: format!("duplicate message label {:?}", b.msg),
                        });
                    }
                }
            }
        }
        for (i, child) in node.children().into_iter().enumerate() {
            path.push(i);
            go(child, path, defects);
            path.pop();
        }
    }
    let mut defects = Vec::new();
    go(&tree.root, &mut Vec::new(), &mut defects);
    WellFormedness {
        defects,
        node_count: tree.size(),
        depth: tree.depth(),
        wcf_nodes: tree.wcf_count(),
    }
}
