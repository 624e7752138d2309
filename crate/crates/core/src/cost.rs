//! Cost exponents and p-norm accumulation.
//!
//! For integer `p` a cost is carried as its p-th power, an exact rational, so
//! identities such as `cost^p = n - 1` can be checked without rounding. A
//! non-integer `p` falls back to `f64`; `p = inf` keeps the exact maximum.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{self, Rational};

/// Tolerance for comparisons in floating-point mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Integer(u32),
    Real(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self, Error> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p.is_nan() || p < 1.0 {
            Err(Error::Parse(format!("cost exponent must be >= 1, got {p}")))
        } else if p.fract() == 0.0 && p <= u32::MAX as f64 {
            Ok(Exponent::Integer(p as u32))
        } else {
            Ok(Exponent::Real(p))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Integer(p) => p as f64,
            Exponent::Real(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Integer(p) => write!(f, "{p}"),
            Exponent::Real(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            t => Exponent::new(t.parse::<f64>().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?),
        }
    }
}

/// A single summand's contribution, already raised to the p-th power
/// (or, for `p = inf`, the plain absolute value).
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(Rational),
    Float(f64),
}

impl Weight {
    pub fn zero(p: Exponent) -> Self {
        match p {
            Exponent::Real(_) => Weight::Float(0.0),
            _ => Weight::Exact(Rational::zero()),
        }
    }

    /// `|d|^p`, or `|d|` for `p = inf`.
    pub fn of_difference(d: &Rational, p: Exponent) -> Self {
        let a = d.abs();
        match p {
            Exponent::Integer(k) => Weight::Exact(rational::pow(&a, k)),
            Exponent::Real(x) => Weight::Float(rational::to_f64(&a).powf(x)),
            Exponent::Infinity => Weight::Exact(a),
        }
    }

    /// Combines two weights: sum for finite `p`, max for `p = inf`.
    pub fn combine(&self, other: &Weight, p: Exponent) -> Weight {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => match p {
                Exponent::Infinity => Weight::Exact(if a >= b { a.clone() } else { b.clone() }),
                _ => Weight::Exact(a + b),
            },
            (a, b) => match p {
                Exponent::Infinity => Weight::Float(a.as_f64().max(b.as_f64())),
                _ => Weight::Float(a.as_f64() + b.as_f64()),
            },
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Weight::Exact(r) => rational::to_f64(r),
            Weight::Float(x) => *x,
        }
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Weight::Exact(a), Weight::Exact(b)) => a.partial_cmp(b),
            (a, b) => a.as_f64().partial_cmp(&b.as_f64()),
        }
    }
}

/// A p-cost. `pow_p` holds the sum of p-th powers (finite p) or the maximum (p = inf).
#[derive(Clone, Debug, PartialEq)]
pub enum Cost {
    Finite { p: Exponent, pow_p: Weight },
    Infinite,
}

impl Cost {
    pub fn zero(p: Exponent) -> Self {
        Cost::Finite { p, pow_p: Weight::zero(p) }
    }

    pub fn from_weight(p: Exponent, pow_p: Weight) -> Self {
        Cost::Finite { p, pow_p }
    }

    /// Accumulates the grade differences into a cost.
    pub fn from_differences<'a>(p: Exponent, diffs: impl IntoIterator<Item = &'a Rational>) -> Self {
        let pow_p = diffs
            .into_iter()
            .fold(Weight::zero(p), |acc, d| acc.combine(&Weight::of_difference(d, p), p));
        Cost::Finite { p, pow_p }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cost::Infinite)
    }

    /// The exact p-th power (integer p) or exact max (p = inf), if available.
    pub fn exact_pow_p(&self) -> Option<&Rational> {
        match self {
            Cost::Finite { pow_p: Weight::Exact(r), .. } => Some(r),
            _ => None,
        }
    }

    /// The cost itself, `pow_p^(1/p)`.
    pub fn value(&self) -> f64 {
        match self {
            Cost::Infinite => f64::INFINITY,
            Cost::Finite { p, pow_p } => match p {
                Exponent::Infinity => pow_p.as_f64(),
                Exponent::Integer(1) => pow_p.as_f64(),
                _ => pow_p.as_f64().powf(1.0 / p.as_f64()),
            },
        }
    }

    /// Canonical text for the p-th power: `"a/b"` when exact, a decimal otherwise.
    pub fn pow_p_text(&self) -> String {
        match self {
            Cost::Infinite => "inf".into(),
            Cost::Finite { pow_p: Weight::Exact(r), .. } => rational::format(r),
            Cost::Finite { pow_p: Weight::Float(x), .. } => format!("{x:.12}"),
        }
    }

    /// The cost rounded to 12 decimal digits.
    pub fn decimal_text(&self) -> String {
        if self.is_infinite() {
            "inf".into()
        } else {
            format!("{:.12}", self.value())
        }
    }

    /// Compares two costs with the same exponent; exact when both are exact.
    pub fn cmp_cost(&self, other: &Cost) -> Ordering {
        match (self, other) {
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
            (Cost::Infinite, _) => Ordering::Greater,
            (_, Cost::Infinite) => Ordering::Less,
            (Cost::Finite { pow_p: a, .. }, Cost::Finite { pow_p: b, .. }) => {
                if let (Weight::Exact(x), Weight::Exact(y)) = (a, b) {
                    x.cmp(y)
                } else {
                    let (x, y) = (a.as_f64(), b.as_f64());
                    if (x - y).abs() <= FLOAT_TOLERANCE * (1.0 + x.abs().max(y.abs())) {
                        Ordering::Equal
                    } else {
                        x.partial_cmp(&y).unwrap_or(Ordering::Equal)
                    }
                }
            }
        }
    }

    /// Whether the p-th power equals `target` (exactly, or within tolerance in float mode).
    pub fn pow_p_equals(&self, target: &Rational) -> bool {
        match self {
            Cost::Infinite => false,
            Cost::Finite { pow_p: Weight::Exact(r), .. } => r == target,
            Cost::Finite { pow_p: Weight::Float(x), .. } => {
                let t = rational::to_f64(target);
                (x - t).abs() <= FLOAT_TOLERANCE * (1.0 + t.abs())
            }
        }
    }
}

/// JSON view of a cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub pow_p: String,
    pub decimal: String,
}

impl From<&Cost> for CostReport {
    fn from(c: &Cost) -> Self {
        CostReport { pow_p: c.pow_p_text(), decimal: c.decimal_text() }
    }
}
