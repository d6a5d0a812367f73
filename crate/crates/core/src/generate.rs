//! Random trees and specs for property tests, benchmarks and acceptance runs.

use rand::Rng;

use crate::analyzer::strategy_count;
use crate::bounds::{classical_bound_rhs, Setting};
use crate::prob::{Prob, Scalar};
use crate::tree::{Node, NodeRef, ProtocolTree};
use crate::types::{CoinFlipSpec, Outcome, Party, WcfSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub max_branching: usize,
    /// Chance that an internal node is a weak-coin-flip node.
    pub wcf_fraction: f64,
    /// Chance that a node above the depth limit is a leaf.
    pub leaf_fraction: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 4,
            max_branching: 3,
            wcf_fraction: 0.2,
            leaf_fraction: 0.25,
        }
    }
}

fn random_outcome<R: Rng>(rng: &mut R) -> Outcome {
    match rng.gen_range(0..3) {
        0 => Outcome::Zero,
        1 => Outcome::One,
        _ => Outcome::Abort,
    }
}

fn random_node<T: Scalar, R: Rng>(rng: &mut R, cfg: &TreeConfig, depth: usize) -> NodeRef<T> {
    if depth >= cfg.max_depth || rng.gen_bool(cfg.leaf_fraction) {
        return Node::leaf(random_outcome(rng));
    }
    if rng.gen_bool(cfg.wcf_fraction) {
        let z = Prob::new(T::from_ratio(rng.gen_range(0..=8), 8)).expect("z in range");
        let eps = Prob::new(T::from_ratio(rng.gen_range(0..=2), 16)).expect("eps in range");
        let a = random_node(rng, cfg, depth + 1);
        let b = random_node(rng, cfg, depth + 1);
        return Node::wcf(WcfSpec::new(z, eps), a, b);
    }
    let sender = if rng.gen_bool(0.5) {
        Party::Alice
    } else {
        Party::Bob
    };
    let n = rng.gen_range(1..=cfg.max_branching.max(1));
    let mut weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let branches: Vec<_> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let prob = Prob::new(T::from_ratio(w, total)).expect("weight ratio in range");
            (format!("m{i}"), prob, random_node(rng, cfg, depth + 1))
        })
        .collect();
    Node::send(sender, branches)
}

/// A random well-formed tree. Zero-probability branches may occur.
pub fn random_tree<T: Scalar, R: Rng>(rng: &mut R, cfg: &TreeConfig) -> ProtocolTree<T> {
    ProtocolTree::new(random_node(rng, cfg, 0))
}

/// Like [`random_tree`], redrawing until each party has at most `limit`
/// deterministic strategies.
pub fn random_tree_within<T: Scalar, R: Rng>(
    rng: &mut R,
    cfg: &TreeConfig,
    limit: u128,
) -> ProtocolTree<T> {
    loop {
        let t = random_tree(rng, cfg);
        if strategy_count(&t, Party::Alice) <= limit && strategy_count(&t, Party::Bob) <= limit {
            return t;
        }
    }
}

/// A random spec feasible in `setting`, on a grid of sixteenths for the
/// cheat parameters.
pub fn random_feasible_spec<T: Scalar, R: Rng>(rng: &mut R, setting: Setting) -> CoinFlipSpec<T> {
    let mut cheat = || T::from_ratio(rng.gen_range(0..=16), 16);
    let (p0s, p1s, ps0, ps1) = (cheat(), cheat(), cheat(), cheat());
    let c0 = p0s.clone() * ps0.clone();
    let c1 = p1s.clone() * ps1.clone();
    let bound = match setting {
        Setting::Classical => classical_bound_rhs(&p0s, &p1s, &ps0, &ps1),
        Setting::Quantum => T::one(),
    };
    let mut p00 = c0 * T::from_ratio(rng.gen_range(0..=8), 8);
    let mut p11 = c1 * T::from_ratio(rng.gen_range(0..=8), 8);
    let total = p00.clone() + p11.clone();
    if total > bound {
        p00 = p00 * bound.clone() / total.clone();
        p11 = p11 * bound / total;
    }
    CoinFlipSpec::from_values([p00, p11, p0s, p1s, ps0, ps1]).expect("generated spec is definable")
}
