//! Tight feasibility conditions for classical and quantum coin flipping, and
//! the symmetric trade-off curves between abort probability and bias.

use std::fmt;

use serde_json::{json, Value};

use crate::prob::{report_value, Scalar};
use crate::types::CoinFlipSpec;

/// Protocol class a feasibility question is asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    Classical,
    Quantum,
}

impl Setting {
    pub fn as_str(self) -> &'static str {
        match self {
            Setting::Classical => "classical",
            Setting::Quantum => "quantum",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A failed inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T> {
    pub name: &'static str,
    pub lhs: T,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict<T> {
    pub setting: Setting,
    pub feasible: bool,
    pub violated: Vec<Violation<T>>,
    /// Quantum feasibility is only achievable up to an arbitrarily small
    /// positive slack on the four cheating parameters.
    pub needs_slack: bool,
}

impl<T: Scalar> FeasibilityVerdict<T> {
    fn from_checks(setting: Setting, checks: Vec<(&'static str, T, T)>) -> Self {
        let violated: Vec<_> = checks
            .into_iter()
            .filter(|(_, lhs, rhs)| !lhs.approx_le(rhs))
            .map(|(name, lhs, rhs)| Violation { name, lhs, rhs })
            .collect();
        FeasibilityVerdict {
            setting,
            feasible: violated.is_empty(),
            needs_slack: setting == Setting::Quantum,
            violated,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "setting": self.setting.as_str(),
            "mode": T::MODE.as_str(),
            "feasible": self.feasible,
            "achievable_with_arbitrarily_small_slack": self.needs_slack,
            "violated": self.violated.iter().map(|v| json!({
                "inequality": v.name,
                "lhs": report_value(&v.lhs),
                "rhs": report_value(&v.rhs),
            })).collect::<Vec<_>>(),
        })
    }
}

impl<T: Scalar> fmt::Display for FeasibilityVerdict<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.feasible {
            write!(f, "{}: feasible", self.setting)?;
            if self.needs_slack {
                write!(
                    f,
                    " (cheating parameters achievable up to any positive slack)"
                )?;
            }
            Ok(())
        } else {
            write!(f, "{}: infeasible", self.setting)?;
            for v in &self.violated {
                write!(f, "; {} fails: {} > {}", v.name, v.lhs, v.rhs)?;
            }
            Ok(())
        }
    }
}

/// `p0s·ps0 + p1s·ps1 − max(0, p0s+p1s−1)·max(0, ps0+ps1−1)`: the largest
/// honest success probability `p00 + p11` a classical protocol can reach.
pub fn classical_bound_rhs<T: Scalar>(p0s: &T, p1s: &T, ps0: &T, ps1: &T) -> T {
    let excess_bob = (p0s.clone() + p1s.clone() - T::one()).max_of(T::zero());
    let excess_alice = (ps0.clone() + ps1.clone() - T::one()).max_of(T::zero());
    p0s.clone() * ps0.clone() + p1s.clone() * ps1.clone() - excess_bob * excess_alice
}

fn product_checks<T: Scalar>(spec: &CoinFlipSpec<T>) -> Vec<(&'static str, T, T)> {
    vec![
        (
            "p00 <= p0*·p*0",
            spec.p00().get(),
            spec.p0s().get() * spec.ps0().get(),
        ),
        (
            "p11 <= p1*·p*1",
            spec.p11().get(),
            spec.p1s().get() * spec.ps1().get(),
        ),
    ]
}

pub fn classical_feasible<T: Scalar>(spec: &CoinFlipSpec<T>) -> FeasibilityVerdict<T> {
    let mut checks = product_checks(spec);
    checks.push((
        "p00 + p11 <= classical bound",
        spec.p00().get() + spec.p11().get(),
        classical_bound_rhs(
            spec.p0s().value(),
            spec.p1s().value(),
            spec.ps0().value(),
            spec.ps1().value(),
        ),
    ));
    FeasibilityVerdict::from_checks(Setting::Classical, checks)
}

pub fn quantum_feasible<T: Scalar>(spec: &CoinFlipSpec<T>) -> FeasibilityVerdict<T> {
    let mut checks = product_checks(spec);
    checks.push((
        "p00 + p11 <= 1",
        spec.p00().get() + spec.p11().get(),
        T::one(),
    ));
    FeasibilityVerdict::from_checks(Setting::Quantum, checks)
}

pub fn feasible<T: Scalar>(spec: &CoinFlipSpec<T>, setting: Setting) -> FeasibilityVerdict<T> {
    match setting {
        Setting::Classical => classical_feasible(spec),
        Setting::Quantum => quantum_feasible(spec),
    }
}

/// Which curve of the symmetric trade-off to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curve {
    Classical,
    Quantum,
    /// The floor implied by definability alone.
    Definitional,
}

/// Smallest forcing probability `p` such that the symmetric coin flip
/// `CF((1−a)/2, (1−a)/2, p, p, p, p)` is achievable, for abort probability `a`.
pub fn symmetric_tradeoff(a: f64, curve: Curve) -> f64 {
    let quantum = ((1.0 - a) / 2.0).sqrt();
    match curve {
        Curve::Definitional => (1.0 - a) / 2.0,
        Curve::Quantum => quantum,
        Curve::Classical if a < 0.5 => 1.0 - (a / 2.0).sqrt(),
        Curve::Classical => quantum,
    }
}
