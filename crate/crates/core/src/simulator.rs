//! Seeded Monte-Carlo execution of protocol trees.
//!
//! Trial `i` of a run with master seed `s` draws from ChaCha8 seeded with
//! `s` on stream `i`, so every trial is reproducible on its own and the
//! aggregate does not depend on execution order. Probabilities are converted
//! to `f64` once and compared against uniform draws in `[0, 1)`.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::prob::Scalar;
use crate::script::{AdversaryScript, Decision};
use crate::tree::{validate_tree, Node, ProtocolTree};
use crate::types::{Outcome, Party};

/// Outcome counts of a batch of trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    pub zero: u64,
    pub one: u64,
    pub abort: u64,
    pub trials: u64,
    pub seed: u64,
}

impl EmpiricalDistribution {
    pub fn count(&self, o: Outcome) -> u64 {
        match o {
            Outcome::Zero => self.zero,
            Outcome::One => self.one,
            Outcome::Abort => self.abort,
        }
    }

    pub fn frequency(&self, o: Outcome) -> f64 {
        self.count(o) as f64 / self.trials as f64
    }

    pub fn to_json(&self) -> Value {
        json!({
            "zero": self.zero,
            "one": self.one,
            "abort": self.abort,
            "trials": self.trials,
            "seed": self.seed,
        })
    }
}

impl fmt::Display for EmpiricalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} trials (seed {}): zero {:.6}, one {:.6}, abort {:.6}",
            self.trials,
            self.seed,
            self.frequency(Outcome::Zero),
            self.frequency(Outcome::One),
            self.frequency(Outcome::Abort)
        )
    }
}

/// Standard deviation of a frequency over `trials` draws with success
/// probability `p`.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Position in the expanded tree, with probabilities as `f64`.
enum Step {
    Leaf(Outcome),
    Send {
        sender: Party,
        /// Cumulative branch probabilities.
        cumulative: Vec<f64>,
        children: Vec<usize>,
    },
    Wcf {
        z: f64,
        children: [usize; 2],
    },
}

/// A tree prepared for repeated sampling, optionally with a cheating party.
struct Runner {
    steps: Vec<Step>,
    cheater: Option<Party>,
    sends: HashMap<usize, usize>,
    forces: HashMap<usize, f64>,
}

impl Runner {
    fn new<T: Scalar>(tree: &ProtocolTree<T>, script: Option<&AdversaryScript<T>>) -> Result<Self> {
        let report = validate_tree(tree);
        if !report.is_well_formed() {
            return Err(Error::MalformedTree(report.to_string()));
        }
        if let Some(s) = script {
            s.validate(tree)?;
        }
        let mut runner = Runner {
            steps: Vec::new(),
            cheater: script.map(|s| s.party),
            sends: HashMap::new(),
            forces: HashMap::new(),
        };
        runner.add(&tree.root, &mut Vec::new(), script);
        Ok(runner)
    }

    fn add<T: Scalar>(
        &mut self,
        node: &Node<T>,
        path: &mut Vec<usize>,
        script: Option<&AdversaryScript<T>>,
    ) -> usize {
        let id = self.steps.len();
        self.steps.push(Step::Leaf(Outcome::Abort));
        match script.and_then(|s| s.decisions.get(path.as_slice())) {
            Some(Decision::Send(i)) => {
                self.sends.insert(id, *i);
            }
            Some(Decision::Force(q)) => {
                self.forces.insert(id, q.to_f64());
            }
            None => {}
        }
        let mut children = Vec::new();
        for (i, child) in node.children().into_iter().enumerate() {
            path.push(i);
            children.push(self.add(child, path, script));
            path.pop();
        }
        self.steps[id] = match node {
            Node::Leaf(o) => Step::Leaf(*o),
            Node::Send { sender, branches } => {
                let mut acc = 0.0;
                let cumulative = branches
                    .iter()
                    .map(|b| {
                        acc += b.prob.to_f64();
                        acc
                    })
                    .collect();
                Step::Send {
                    sender: *sender,
                    cumulative,
                    children,
                }
            }
            Node::Wcf { spec, .. } => Step::Wcf {
                z: spec.z.to_f64(),
                children: [children[0], children[1]],
            },
        };
        id
    }

    fn run(&self, rng: &mut ChaCha8Rng) -> Outcome {
        let mut at = 0;
        loop {
            match &self.steps[at] {
                Step::Leaf(o) => return *o,
                Step::Send {
                    sender,
                    cumulative,
                    children,
                } => {
                    at = if Some(*sender) == self.cheater {
                        children[self.sends[&at]]
                    } else {
                        let u: f64 = rng.gen();
                        let i = cumulative
                            .iter()
                            .position(|&c| u < c)
                            .unwrap_or(children.len() - 1);
                        children[i]
                    };
                }
                Step::Wcf { z, children } => {
                    let q = self.forces.get(&at).copied().unwrap_or(*z);
                    let u: f64 = rng.gen();
                    at = if u < q { children[0] } else { children[1] };
                }
            }
        }
    }

    fn run_many(&self, trials: u64, seed: u64) -> Result<EmpiricalDistribution> {
        if trials == 0 {
            return Err(Error::PreconditionViolation(
                "trials >= 1 fails: trials = 0".into(),
            ));
        }
        let mut dist = EmpiricalDistribution {
            zero: 0,
            one: 0,
            abort: 0,
            trials,
            seed,
        };
        for i in 0..trials {
            match self.run(&mut trial_rng(seed, i)) {
                Outcome::Zero => dist.zero += 1,
                Outcome::One => dist.one += 1,
                Outcome::Abort => dist.abort += 1,
            }
        }
        Ok(dist)
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One honest execution. Equal to trial 0 of [`estimate_honest`] with the
/// same seed.
pub fn run_honest<T: Scalar>(tree: &ProtocolTree<T>, seed: u64) -> Result<Outcome> {
    Ok(Runner::new(tree, None)?.run(&mut trial_rng(seed, 0)))
}

/// Outcome counts of `trials` honest executions.
pub fn estimate_honest<T: Scalar>(
    tree: &ProtocolTree<T>,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    Runner::new(tree, None)?.run_many(trials, seed)
}

/// Outcome counts (the honest party's output) when `script.party` follows
/// the script and the other party is honest.
pub fn run_adversarial<T: Scalar>(
    tree: &ProtocolTree<T>,
    script: &AdversaryScript<T>,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    Runner::new(tree, Some(script))?.run_many(trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Exact, Prob};

    fn q(n: i64, d: i64) -> Prob<Exact> {
        Prob::ratio(n, d).unwrap()
    }

    fn announce() -> ProtocolTree<Exact> {
        let accept = |o| Node::send(Party::Bob, [("ok", q(1, 1), Node::leaf(o))]);
        ProtocolTree::new(Node::send(
            Party::Alice,
            [
                ("0", q(1, 2), accept(Outcome::Zero)),
                ("1", q(1, 2), accept(Outcome::One)),
            ],
        ))
    }

    #[test]
    fn leaves_are_deterministic() {
        let t = ProtocolTree::<Exact>::leaf(Outcome::One);
        assert_eq!(run_honest(&t, 7).unwrap(), Outcome::One);
        let d = estimate_honest(&t, 1, 7).unwrap();
        assert_eq!((d.one, d.trials), (1, 1));
    }

    #[test]
    fn honest_frequencies_and_determinism() {
        let t = announce();
        let d = estimate_honest(&t, 100_000, 42).unwrap();
        assert_eq!(d.zero + d.one + d.abort, d.trials);
        assert!((d.frequency(Outcome::Zero) - 0.5).abs() <= 3.0 * binomial_sigma(0.5, d.trials));
        assert_eq!(estimate_honest(&t, 100_000, 42).unwrap(), d);
        assert_ne!(estimate_honest(&t, 100_000, 43).unwrap(), d);
        assert_eq!(run_honest(&t, 42).unwrap(), {
            let first = estimate_honest(&t, 1, 42).unwrap();
            if first.zero == 1 {
                Outcome::Zero
            } else {
                Outcome::One
            }
        });
    }

    #[test]
    fn scripted_sender() {
        let t = announce();
        let script = AdversaryScript::new(Party::Alice).with(vec![], Decision::Send(0));
        let d = run_adversarial(&t, &script, 10_000, 1).unwrap();
        assert_eq!(d.zero, 10_000);
    }

    #[test]
    fn missing_decision_is_a_mismatch() {
        let script = AdversaryScript::<Exact>::new(Party::Alice);
        assert!(matches!(
            run_adversarial(&announce(), &script, 10, 1),
            Err(Error::ScriptMismatch(_))
        ));
        let bob = AdversaryScript::new(Party::Bob).with(vec![], Decision::Send(0));
        assert!(matches!(
            run_adversarial(&announce(), &bob, 10, 1),
            Err(Error::ScriptMismatch(_))
        ));
    }

    #[test]
    fn empty_script_on_leaf_matches_honest() {
        let t = ProtocolTree::<Exact>::leaf(Outcome::Zero);
        let script = AdversaryScript::new(Party::Bob);
        assert_eq!(
            run_adversarial(&t, &script, 50, 3).unwrap(),
            estimate_honest(&t, 50, 3).unwrap()
        );
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(estimate_honest(&announce(), 0, 1).is_err());
    }

    #[test]
    fn json_shape() {
        let d = estimate_honest(&announce(), 10, 5).unwrap();
        let v = d.to_json();
        for key in ["zero", "one", "abort", "trials", "seed"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
