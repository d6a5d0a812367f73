//! Shared domain types: coin-flip parameter sets, parties, outcomes, the
//! weak-coin-flip resource and analysis results.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::prob::{report_value, Prob, Scalar};

/// One of the two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Party {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alice" => Ok(Party::Alice),
            "bob" => Ok(Party::Bob),
            other => Err(Error::Parse(format!(
                "unknown party {other:?} (expected \"alice\" or \"bob\")"
            ))),
        }
    }
}

/// The common output of both players: a bit or the abort symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Zero,
    One,
    Abort,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Zero => "0",
            Outcome::One => "1",
            Outcome::Abort => "abort",
        }
    }

    pub fn bit(b: u8) -> Outcome {
        if b == 0 {
            Outcome::Zero
        } else {
            Outcome::One
        }
    }

    /// Exchanges `0` and `1`; abort is fixed.
    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Zero => Outcome::One,
            Outcome::One => Outcome::Zero,
            Outcome::Abort => Outcome::Abort,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(Outcome::Zero),
            "1" => Ok(Outcome::One),
            "abort" => Ok(Outcome::Abort),
            other => Err(Error::Parse(format!(
                "unknown output {other:?} (expected \"0\", \"1\" or \"abort\")"
            ))),
        }
    }
}

/// The six parameters of a generalized coin flip.
///
/// `p00`/`p11` are the honest output probabilities. `p0s`/`p1s` bound how
/// likely a cheating Bob can make Alice output 0/1; `ps0`/`ps1` bound how
/// likely a cheating Alice can make Bob output 0/1.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinFlipSpec<T> {
    p00: Prob<T>,
    p11: Prob<T>,
    p0s: Prob<T>,
    p1s: Prob<T>,
    ps0: Prob<T>,
    ps1: Prob<T>,
}

/// Validates the definability constraints and builds a spec.
pub fn make_spec<T: Scalar>(
    p00: Prob<T>,
    p11: Prob<T>,
    p0s: Prob<T>,
    p1s: Prob<T>,
    ps0: Prob<T>,
    ps1: Prob<T>,
) -> Result<CoinFlipSpec<T>> {
    let honest = p00.get() + p11.get();
    if honest > T::one() {
        return Err(Error::ConstraintViolation(format!(
            "p00 + p11 <= 1 fails: {p00} + {p11} = {honest}"
        )));
    }
    let min0 = p0s.get().min_of(ps0.get());
    if p00.get() > min0 {
        return Err(Error::ConstraintViolation(format!(
            "p00 <= min(p0*, p*0) fails: {p00} > {min0}"
        )));
    }
    let min1 = p1s.get().min_of(ps1.get());
    if p11.get() > min1 {
        return Err(Error::ConstraintViolation(format!(
            "p11 <= min(p1*, p*1) fails: {p11} > {min1}"
        )));
    }
    Ok(CoinFlipSpec {
        p00,
        p11,
        p0s,
        p1s,
        ps0,
        ps1,
    })
}

impl<T: Scalar> CoinFlipSpec<T> {
    /// Builds a spec from raw scalars, range-checking each one.
    pub fn from_values(values: [T; 6]) -> Result<Self> {
        let [a, b, c, d, e, f] = values;
        make_spec(
            Prob::new(a)?,
            Prob::new(b)?,
            Prob::new(c)?,
            Prob::new(d)?,
            Prob::new(e)?,
            Prob::new(f)?,
        )
    }

    pub fn from_ratios(values: [(i64, i64); 6]) -> Result<Self> {
        Self::from_values(values.map(|(n, d)| T::from_ratio(n, d)))
    }

    /// Parses six decimal or `a/b` literals in the order
    /// `p00, p11, p0*, p1*, p*0, p*1`.
    pub fn parse_list(items: &[&str]) -> Result<Self> {
        if items.len() != 6 {
            return Err(Error::Parse(format!(
                "expected 6 comma-separated values, got {}",
                items.len()
            )));
        }
        let mut values = Vec::with_capacity(6);
        for item in items {
            values.push(T::parse_literal(item)?);
        }
        let values: [T; 6] = values.try_into().expect("length checked");
        Self::from_values(values)
    }

    pub fn p00(&self) -> &Prob<T> {
        &self.p00
    }
    pub fn p11(&self) -> &Prob<T> {
        &self.p11
    }
    pub fn p0s(&self) -> &Prob<T> {
        &self.p0s
    }
    pub fn p1s(&self) -> &Prob<T> {
        &self.p1s
    }
    pub fn ps0(&self) -> &Prob<T> {
        &self.ps0
    }
    pub fn ps1(&self) -> &Prob<T> {
        &self.ps1
    }

    /// Same spec with different honest probabilities.
    pub fn with_honest(&self, p00: Prob<T>, p11: Prob<T>) -> Result<Self> {
        make_spec(
            p00,
            p11,
            self.p0s.clone(),
            self.p1s.clone(),
            self.ps0.clone(),
            self.ps1.clone(),
        )
    }

    /// The spec seen after exchanging the roles of Alice and Bob.
    pub fn swap_parties(&self) -> Self {
        CoinFlipSpec {
            p00: self.p00.clone(),
            p11: self.p11.clone(),
            p0s: self.ps0.clone(),
            p1s: self.ps1.clone(),
            ps0: self.p0s.clone(),
            ps1: self.p1s.clone(),
        }
    }

    /// The spec seen after renaming output 0 to 1 and vice versa.
    pub fn swap_outputs(&self) -> Self {
        CoinFlipSpec {
            p00: self.p11.clone(),
            p11: self.p00.clone(),
            p0s: self.p1s.clone(),
            p1s: self.p0s.clone(),
            ps0: self.ps1.clone(),
            ps1: self.ps0.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p00": report_value(self.p00.value()),
            "p11": report_value(self.p11.value()),
            "p0s": report_value(self.p0s.value()),
            "p1s": report_value(self.p1s.value()),
            "ps0": report_value(self.ps0.value()),
            "ps1": report_value(self.ps1.value()),
        })
    }
}

impl<T: Scalar> fmt::Display for CoinFlipSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CF({}, {}, {}, {}, {}, {})",
            self.p00, self.p11, self.p0s, self.p1s, self.ps0, self.ps1
        )
    }
}

/// Unbalanced weak coin flip resource: Alice wins (outcome 0) with honest
/// probability `z`, and each side can raise its own winning probability by
/// at most `eps`. Either side may also lose on purpose.
#[derive(Debug, Clone, PartialEq)]
pub struct WcfSpec<T> {
    pub z: Prob<T>,
    pub eps: Prob<T>,
}

impl<T: Scalar> WcfSpec<T> {
    pub fn new(z: Prob<T>, eps: Prob<T>) -> Self {
        WcfSpec { z, eps }
    }

    pub fn ideal(z: Prob<T>) -> Self {
        WcfSpec {
            z,
            eps: Prob::zero(),
        }
    }

    /// Interval of Pr[Alice wins] a cheating `party` can steer the resource to.
    pub fn steerable_range(&self, cheater: Party) -> (T, T) {
        let z = self.z.get();
        let eps = self.eps.get();
        match cheater {
            Party::Alice => (T::zero(), (z + eps).min_of(T::one())),
            Party::Bob => {
                let lo = z - eps;
                (lo.max_of(T::zero()), T::one())
            }
        }
    }

    /// The resource after exchanging the roles of Alice and Bob.
    pub fn swapped(&self) -> Self {
        WcfSpec {
            z: self.z.complement(),
            eps: self.eps.clone(),
        }
    }
}

/// Exact honest output distribution and optimal forcing probabilities.
///
/// `force_a*` is what a cheating Alice can make Bob output; `force_b*` is
/// what a cheating Bob can make Alice output.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult<T> {
    pub p00: Prob<T>,
    pub p11: Prob<T>,
    pub abort: Prob<T>,
    pub force_a0: Prob<T>,
    pub force_a1: Prob<T>,
    pub force_b0: Prob<T>,
    pub force_b1: Prob<T>,
}

impl<T: Scalar> AnalysisResult<T> {
    /// Forcing probability of `cheater` towards `target` (0 or 1).
    pub fn force(&self, cheater: Party, target: u8) -> &Prob<T> {
        match (cheater, target) {
            (Party::Alice, 0) => &self.force_a0,
            (Party::Alice, _) => &self.force_a1,
            (Party::Bob, 0) => &self.force_b0,
            (Party::Bob, _) => &self.force_b1,
        }
    }

    pub fn honest(&self, bit: u8) -> &Prob<T> {
        if bit == 0 {
            &self.p00
        } else {
            &self.p11
        }
    }

    /// Reads the result as the tightest coin-flip spec the protocol implements.
    pub fn as_spec(&self) -> Result<CoinFlipSpec<T>> {
        make_spec(
            self.p00.clone(),
            self.p11.clone(),
            self.force_b0.clone(),
            self.force_b1.clone(),
            self.force_a0.clone(),
            self.force_a1.clone(),
        )
    }

    pub fn swap_parties(&self) -> Self {
        AnalysisResult {
            p00: self.p00.clone(),
            p11: self.p11.clone(),
            abort: self.abort.clone(),
            force_a0: self.force_b0.clone(),
            force_a1: self.force_b1.clone(),
            force_b0: self.force_a0.clone(),
            force_b1: self.force_a1.clone(),
        }
    }

    pub fn swap_outputs(&self) -> Self {
        AnalysisResult {
            p00: self.p11.clone(),
            p11: self.p00.clone(),
            abort: self.abort.clone(),
            force_a0: self.force_a1.clone(),
            force_a1: self.force_a0.clone(),
            force_b0: self.force_b1.clone(),
            force_b1: self.force_b0.clone(),
        }
    }

    /// Fields in a fixed order, paired with their names.
    pub fn fields(&self) -> [(&'static str, &Prob<T>); 7] {
        [
            ("p00", &self.p00),
            ("p11", &self.p11),
            ("abort", &self.abort),
            ("force_a0", &self.force_a0),
            ("force_a1", &self.force_a1),
            ("force_b0", &self.force_b0),
            ("force_b1", &self.force_b1),
        ]
    }

    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("mode".into(), Value::String(T::MODE.to_string()));
        for (name, value) in self.fields() {
            obj.insert(name.into(), report_value(value.value()));
        }
        Value::Object(obj)
    }
}

impl<T: Scalar> fmt::Display for AnalysisResult<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "honest (p00, p11, abort) = ({}, {}, {}); forcing Alice->Bob (0, 1) = ({}, {}); Bob->Alice (0, 1) = ({}, {})",
            self.p00, self.p11, self.abort, self.force_a0, self.force_a1, self.force_b0, self.force_b1
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Exact;
    use proptest::prelude::*;

    fn spec(v: [(i64, i64); 6]) -> Result<CoinFlipSpec<Exact>> {
        CoinFlipSpec::from_ratios(v)
    }

    #[test]
    fn perfect_coin_flips_are_definable() {
        let h = (1, 2);
        assert!(spec([h, h, h, h, h, h]).is_ok());
        assert!(spec([h, h, (1, 1), h, h, (1, 1)]).is_ok());
    }

    #[test]
    fn honest_sum_above_one_is_rejected() {
        let err = spec([(3, 5), (3, 5), (1, 1), (1, 1), (1, 1), (1, 1)]).unwrap_err();
        match err {
            Error::ConstraintViolation(msg) => assert!(msg.contains("p00 + p11")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn honest_above_cheat_is_rejected() {
        let err = spec([(1, 2), (0, 1), (1, 4), (1, 1), (1, 1), (1, 1)]).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation(ref m) if m.contains("p00 <= min")));
        let err = spec([(0, 1), (1, 2), (1, 1), (1, 1), (1, 1), (1, 4)]).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation(ref m) if m.contains("p11 <= min")));
    }

    #[test]
    fn parse_list_reads_both_forms() {
        let s = CoinFlipSpec::<Exact>::parse_list(&["7/16", "0.4375", "3/4", "0.75", "3/4", "3/4"])
            .unwrap();
        assert_eq!(s.p00(), s.p11());
        assert!(CoinFlipSpec::<Exact>::parse_list(&["1", "0"]).is_err());
    }

    #[test]
    fn wcf_ranges() {
        let w = WcfSpec::new(
            Prob::<Exact>::ratio(3, 4).unwrap(),
            Prob::ratio(1, 2).unwrap(),
        );
        assert_eq!(
            w.steerable_range(Party::Alice),
            (Exact::zero(), Exact::one())
        );
        assert_eq!(
            w.steerable_range(Party::Bob),
            (Exact::from_ratio(1, 4), Exact::one())
        );
    }

    proptest! {
        #[test]
        fn accepted_specs_satisfy_constraints(v in proptest::array::uniform6(0i64..=8)) {
            let vals = v.map(|n| (n, 8));
            if let Ok(s) = spec(vals) {
                prop_assert!(s.p00().get() + s.p11().get() <= Exact::one());
                prop_assert!(s.p00() <= s.p0s() && s.p00() <= s.ps0());
                prop_assert!(s.p11() <= s.p1s() && s.p11() <= s.ps1());
            } else {
                let [a, b, c, d, e, f] = v;
                prop_assert!(a + b > 8 || a > c.min(e) || b > d.min(f));
            }
        }
    }
}
