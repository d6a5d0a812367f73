//! Generalized two-party coin flipping: feasibility bounds, protocol
//! constructions, exact analysis and simulation.
//!
//! A [`CoinFlipSpec`] fixes the honest output probabilities and how far each
//! cheating party may push the other's output. [`bounds`] decides whether a
//! spec is achievable classically or with quantum protocols,
//! [`protocols::synthesize`] builds a [`ProtocolTree`] for it, and
//! [`analyzer::analyze`] computes exactly what the tree implements.

pub mod analyzer;
pub mod bounds;
pub mod error;
pub mod format;
pub mod generate;
pub mod prob;
pub mod protocols;
pub mod script;
pub mod simulator;
pub mod sweep;
pub mod tree;
pub mod types;

pub use analyzer::{analyze, brute_force_analyze, extract_optimal_script, verify_implements};
pub use bounds::{classical_feasible, feasible, quantum_feasible, FeasibilityVerdict, Setting};
pub use error::{Error, Result};
pub use prob::{Exact, Mode, Prob, Scalar};
pub use protocols::synthesize;
pub use script::{AdversaryScript, Decision};
pub use simulator::{estimate_honest, run_adversarial, run_honest, EmpiricalDistribution};
pub use tree::{validate_tree, Node, NodeRef, Path, ProtocolTree};
pub use types::{AnalysisResult, CoinFlipSpec, Outcome, Party, WcfSpec};
