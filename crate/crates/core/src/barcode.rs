//! Barcodes: finite multisets of half-open intervals `[birth, death)`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Death {
    Finite(Rational),
    Infinite,
}

impl Death {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Death::Finite(d) => Some(d),
            Death::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub birth: Rational,
    pub death: Death,
}

impl Interval {
    pub fn new(birth: Rational, death: Death) -> Result<Self> {
        if let Death::Finite(d) = &death {
            if d < &birth {
                return Err(Error::Parse(format!(
                    "interval [{}, {}) has death before birth",
                    rational::format(&birth),
                    rational::format(d)
                )));
            }
        }
        Ok(Interval { birth, death })
    }

    pub fn finite(birth: Rational, death: Rational) -> Self {
        Interval::new(birth, Death::Finite(death)).expect("birth <= death")
    }

    pub fn infinite(birth: Rational) -> Self {
        Interval { birth, death: Death::Infinite }
    }

    pub fn is_infinite(&self) -> bool {
        self.death == Death::Infinite
    }

    pub fn is_empty(&self) -> bool {
        self.death.finite() == Some(&self.birth)
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.birth.cmp(&other.birth).then_with(|| self.death.cmp(&other.death))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.death {
            Death::Finite(d) => write!(f, "[{}, {})", rational::format(&self.birth), rational::format(d)),
            Death::Infinite => write!(f, "[{}, inf)", rational::format(&self.birth)),
        }
    }
}

/// A multiset of intervals. Order of `intervals` is not significant for equality.
#[derive(Clone, Debug, Default)]
pub struct Barcode {
    pub intervals: Vec<Interval>,
}

impl PartialEq for Barcode {
    fn eq(&self, other: &Self) -> bool {
        self.sorted() == other.sorted()
    }
}

impl Eq for Barcode {}

impl Barcode {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Barcode { intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn sorted(&self) -> Vec<Interval> {
        let mut v = self.intervals.clone();
        v.sort();
        v
    }

    /// Distinct intervals with their multiplicities, in sorted order.
    pub fn multiplicities(&self) -> Vec<(Interval, usize)> {
        let mut out: Vec<(Interval, usize)> = Vec::new();
        for iv in self.sorted() {
            match out.last_mut() {
                Some((last, m)) if *last == iv => *m += 1,
                _ => out.push((iv, 1)),
            }
        }
        out
    }

    pub fn count(&self, interval: &Interval) -> usize {
        self.intervals.iter().filter(|iv| *iv == interval).count()
    }

    pub fn infinite_count(&self) -> usize {
        self.intervals.iter().filter(|iv| iv.is_infinite()).count()
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .multiplicities()
            .into_iter()
            .map(|(iv, m)| if m == 1 { iv.to_string() } else { format!("{iv}x{m}") })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    #[serde(with = "rational::serde_str")]
    birth: Rational,
    death: String,
    #[serde(default = "one")]
    mult: usize,
}

fn one() -> usize {
    1
}

#[derive(Serialize, Deserialize)]
struct BarcodeJson {
    intervals: Vec<IntervalJson>,
}

impl Serialize for Barcode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let intervals = self
            .multiplicities()
            .into_iter()
            .map(|(iv, mult)| IntervalJson {
                birth: iv.birth,
                death: match iv.death {
                    Death::Finite(d) => rational::format(&d),
                    Death::Infinite => "inf".into(),
                },
                mult,
            })
            .collect();
        BarcodeJson { intervals }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Barcode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BarcodeJson::deserialize(d)?;
        let mut intervals = Vec::new();
        for iv in raw.intervals {
            let death = match iv.death.trim() {
                "inf" | "infinity" => Death::Infinite,
                t => Death::Finite(rational::parse(t).map_err(D::Error::custom)?),
            };
            let interval = Interval::new(iv.birth, death).map_err(D::Error::custom)?;
            intervals.extend(std::iter::repeat_n(interval, iv.mult));
        }
        Ok(Barcode { intervals })
    }
}
