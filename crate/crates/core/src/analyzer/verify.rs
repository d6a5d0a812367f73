use std::fmt;

use serde_json::{json, Value};

use crate::error::Result;
use crate::prob::{report_value, Prob, Scalar};
use crate::tree::ProtocolTree;
use crate::types::CoinFlipSpec;

use super::analyze;

/// One condition of the implementation check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check<T> {
    pub name: &'static str,
    /// `"=="` for honest probabilities, `"<="` for forcing values.
    pub relation: &'static str,
    pub actual: T,
    pub expected: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    pub checks: Vec<Check<T>>,
}

impl<T: Scalar> VerificationReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "relation": c.relation,
                "actual": report_value(&c.actual),
                "expected": report_value(&c.expected),
                "passed": c.passed,
            })).collect::<Vec<_>>(),
        })
    }
}

impl<T: Scalar> fmt::Display for VerificationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {} {} {}: {}",
                c.name,
                c.actual,
                c.relation,
                c.expected,
                if c.passed { "ok" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "{}",
            if self.passed() {
                "implements spec"
            } else {
                "does not implement spec"
            }
        )
    }
}

/// Checks that `tree` implements `spec`: honest probabilities equal within
/// `tol`, forcing values at most the cheat parameters plus `tol`.
pub fn verify_implements<T: Scalar>(
    tree: &ProtocolTree<T>,
    spec: &CoinFlipSpec<T>,
    tol: &Prob<T>,
) -> Result<VerificationReport<T>> {
    let r = analyze(tree)?;
    let tol = tol.get();
    let eq = |name, a: &Prob<T>, b: &Prob<T>| Check {
        name,
        relation: "==",
        actual: a.get(),
        expected: b.get(),
        passed: a.value().abs_diff(b.value()) <= tol,
    };
    let le = |name, a: &Prob<T>, b: &Prob<T>| Check {
        name,
        relation: "<=",
        actual: a.get(),
        expected: b.get(),
        passed: a.get() <= b.get() + tol.clone(),
    };
    Ok(VerificationReport {
        checks: vec![
            eq("p00", &r.p00, spec.p00()),
            eq("p11", &r.p11, spec.p11()),
            le("force_b0", &r.force_b0, spec.p0s()),
            le("force_b1", &r.force_b1, spec.p1s()),
            le("force_a0", &r.force_a0, spec.ps0()),
            le("force_a1", &r.force_a1, spec.ps1()),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Exact;
    use crate::tree::Node;
    use crate::types::{Outcome, Party};

    #[test]
    fn always_abort_implements_trivial_spec() {
        let t = ProtocolTree::<Exact>::leaf(Outcome::Abort);
        let spec =
            CoinFlipSpec::from_ratios([(0, 1), (0, 1), (1, 1), (1, 1), (1, 1), (1, 1)]).unwrap();
        assert!(verify_implements(&t, &spec, &Prob::zero())
            .unwrap()
            .passed());
    }

    #[test]
    fn announced_bit_is_not_a_strong_coin_flip() {
        let half = Prob::<Exact>::ratio(1, 2).unwrap();
        let accept = |o| Node::send(Party::Bob, [("ok", Prob::one(), Node::leaf(o))]);
        let t = ProtocolTree::new(Node::send(
            Party::Alice,
            [
                ("0", half.clone(), accept(Outcome::Zero)),
                ("1", half, accept(Outcome::One)),
            ],
        ));
        let spec =
            CoinFlipSpec::from_ratios([(1, 2), (1, 2), (1, 2), (1, 2), (1, 2), (1, 2)]).unwrap();
        let report = verify_implements(&t, &spec, &Prob::zero()).unwrap();
        assert!(!report.passed());
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        assert_eq!(failed, ["force_a0", "force_a1"]);
    }
}
