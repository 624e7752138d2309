//! Reduction gadgets: balanced partition instances become pairs of merge
//! trees, constrained invertibility instances become pairs of 2-parameter
//! presentations.

pub mod balpart;
pub mod ci;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cost::Exponent;
use crate::rational;

pub use balpart::{balpart_certificate, build_balpart_trees, BalPartCertificate, BalPartInstance, BalPartTrees};
pub use ci::{anchors, build_ci_modules, ci_certificate, Anchor, CiCertificate, CiGadget, CiInstance, Zero, ZeroKind};

/// A problem instance as read from disk: `{"balpart": {...}}` or `{"ci": {...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Instance {
    Balpart(BalPartInstance),
    Ci(CiInstance),
}

/// Smallest even integer `c` with `c >= 4 * base^(1/p)`.
pub fn separation_constant(base: u64, p: Exponent) -> i64 {
    match p {
        Exponent::Infinity => 4,
        Exponent::Real(x) => rational::ceil_even(4.0 * (base as f64).powf(1.0 / x)),
        Exponent::Integer(k) => {
            // c^k >= 4^k * base, decided exactly.
            let target = num_traits::pow(BigInt::from(4), k as usize) * BigInt::from(base);
            let estimate = rational::ceil_even(4.0 * (base as f64).powf(1.0 / f64::from(k)));
            let mut c = (estimate - 4).max(2);
            if c % 2 != 0 {
                c += 1;
            }
            while num_traits::pow(BigInt::from(c), k as usize) < target {
                c += 2;
            }
            c
        }
    }
}
