//! Probability arithmetic in two modes.
//!
//! Every computation in this crate is generic over a [`Scalar`]: either an
//! exact arbitrary-precision rational ([`Exact`]) or an `f64`. The mode is
//! fixed by the type parameter, so exact and floating values cannot be mixed
//! within one computation. Float comparisons use an absolute tolerance of
//! [`FLOAT_TOLERANCE`]; exact comparisons have zero tolerance.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational probability arithmetic.
pub type Exact = BigRational;

/// Absolute tolerance used by float-mode comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Slack used when breaking argmax ties in float mode.
pub const FLOAT_TIE_SLACK: f64 = 1e-12;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" | "exact" => Ok(Mode::Rational),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!(
                "unknown arithmetic mode {other:?} (expected rational or float)"
            ))),
        }
    }
}

/// Number type a computation runs in.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Absolute tolerance for comparisons: zero in exact mode.
    fn tolerance() -> Self;
    /// Slack used to stabilise argmax tie-breaking.
    fn tie_slack() -> Self;
    /// Parses a decimal (`0.75`, `7.5e-1`) or ratio (`3/4`) literal.
    ///
    /// Decimal literals are converted exactly in rational mode.
    fn parse_literal(s: &str) -> Result<Self>;
    /// Renders the value for the tree file format: `"a/b"` strings in
    /// rational mode, JSON numbers in float mode.
    fn to_wire(&self) -> Value;
    /// Exact `"a/b"` rendering, when the mode has one.
    fn exact_string(&self) -> Option<String>;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn is_zero_value(&self) -> bool {
        *self == Self::zero()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    /// `self == other` up to the mode tolerance.
    fn approx_eq(&self, other: &Self) -> bool {
        self.abs_diff(other) <= Self::tolerance()
    }

    /// `self <= other` up to the mode tolerance.
    fn approx_le(&self, other: &Self) -> bool {
        *self <= other.clone() + Self::tolerance()
    }

    /// `self > other` beyond the mode tolerance.
    fn definitely_gt(&self, other: &Self) -> bool {
        !self.approx_le(other)
    }
}

impl Scalar for Exact {
    const MODE: Mode = Mode::Rational;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn tolerance() -> Self {
        Zero::zero()
    }

    fn tie_slack() -> Self {
        Zero::zero()
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num = parse_bigint(num)?;
            let den = parse_bigint(den)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(BigRational::new(num, den));
        }
        parse_decimal(s)
    }

    fn to_wire(&self) -> Value {
        Value::String(ratio_string(self))
    }

    fn exact_string(&self) -> Option<String> {
        Some(ratio_string(self))
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn tie_slack() -> Self {
        FLOAT_TIE_SLACK
    }

    fn parse_literal(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num = parse_bigint(num)?;
            let den = parse_bigint(den)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::to_f64(&BigRational::new(num, den)));
        }
        // Reuse the strict decimal grammar so both modes accept the same inputs.
        parse_decimal(s)?;
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }

    fn to_wire(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn exact_string(&self) -> Option<String> {
        None
    }
}

fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    let t = s.trim();
    if t.is_empty()
        || !t
            .trim_start_matches(['-', '+'])
            .chars()
            .all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("not an integer: {s:?}")));
    }
    t.parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Exact conversion of a decimal literal such as `-12.5e-3`.
fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let mut scale: i64 = -(frac_part.len() as i64);
    if let Some(exp) = exponent {
        let e: i64 = exp.parse().map_err(|_| bad())?;
        if e.abs() > 10_000 {
            return Err(bad());
        }
        scale += e;
    }
    if negative {
        numer = -numer;
    }
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// A probability: a scalar constrained to `[0, 1]`.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Prob<T>(T);

impl<T: Scalar> Prob<T> {
    /// Strict constructor: rejects anything outside `[0, 1]`.
    pub fn new(value: T) -> Result<Self> {
        if value < T::zero() || value > T::one() {
            return Err(Error::ProbOutOfRange(value.to_string()));
        }
        if T::MODE == Mode::Float && value.to_f64().is_nan() {
            return Err(Error::ProbOutOfRange("NaN".into()));
        }
        Ok(Prob(value))
    }

    /// Constructor for computed values: accepts values within the mode
    /// tolerance of `[0, 1]` and clamps them into range.
    pub fn from_computed(value: T) -> Result<Self> {
        if value < T::zero() - T::tolerance() || value > T::one() + T::tolerance() {
            return Err(Error::ProbOutOfRange(value.to_string()));
        }
        if T::MODE == Mode::Float && value.to_f64().is_nan() {
            return Err(Error::ProbOutOfRange("NaN".into()));
        }
        Ok(Prob(value.max_of(T::zero()).min_of(T::one())))
    }

    pub fn zero() -> Self {
        Prob(T::zero())
    }

    pub fn one() -> Self {
        Prob(T::one())
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        Self::new(T::from_ratio(num, den))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(T::parse_literal(s)?)
    }

    pub fn value(&self) -> &T {
        &self.0
    }

    /// Owned copy of the underlying scalar.
    pub fn get(&self) -> T {
        self.0.clone()
    }

    pub fn into_inner(self) -> T {
        self.0
    }

    /// `1 - self`.
    pub fn complement(&self) -> Self {
        Prob(T::one() - self.0.clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl<T: fmt::Debug> fmt::Debug for Prob<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl<T: fmt::Display> fmt::Display for Prob<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Two-entry JSON rendering used for reports: decimal plus exact `"a/b"`.
pub fn report_value<T: Scalar>(v: &T) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert(
        "decimal".into(),
        serde_json::Number::from_f64(v.to_f64())
            .map(Value::Number)
            .unwrap_or(Value::Null),
    );
    if let Some(exact) = v.exact_string() {
        obj.insert("exact".into(), Value::String(exact));
    }
    Value::Object(obj)
}

/// Parses a JSON value holding a probability literal (number or string).
pub fn scalar_from_json<T: Scalar>(value: &Value) -> Result<T> {
    match value {
        Value::Number(n) => T::parse_literal(&n.to_string()),
        Value::String(s) => T::parse_literal(s),
        other => Err(Error::Parse(format!(
            "expected a number or \"a/b\" string, found {other}"
        ))),
    }
}

/// Whether the literal is a ratio (`a/b`) rather than a decimal.
pub fn is_ratio_literal(s: &str) -> bool {
    s.contains('/')
}
