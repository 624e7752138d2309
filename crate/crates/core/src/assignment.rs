//! Minimum-cost assignment (Hungarian algorithm with potentials).
//!
//! Works over any ordered additive weight, so exact rationals give exact
//! optima. Entries set to `None` are forbidden edges.

use std::ops::{Add, Sub};

use num_traits::Zero;

use crate::cost::{Exponent, Weight};
use crate::rational::Rational;

pub trait AssignWeight: Clone + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self> {}

impl<T> AssignWeight for T where T: Clone + PartialOrd + Zero + Add<Output = T> + Sub<Output = T> {}

/// Solves the `n x m` assignment problem with `n <= m`, assigning every row.
///
/// Returns the total cost and `row -> column`, or `None` when no assignment
/// avoids the forbidden edges.
pub fn hungarian<W: AssignWeight>(cost: &[Vec<Option<W>>]) -> Option<(W, Vec<usize>)> {
    let n = cost.len();
    if n == 0 {
        return Some((W::zero(), Vec::new()));
    }
    let m = cost[0].len();
    assert!(cost.iter().all(|r| r.len() == m), "ragged cost matrix");
    assert!(n <= m, "more rows than columns");

    // 1-based; column 0 is a virtual root.
    let mut u = vec![W::zero(); n + 1];
    let mut v = vec![W::zero(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<W>> = vec![None; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<W> = None;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                if let Some(c) = &cost[i0 - 1][j - 1] {
                    let cur = c.clone() - u[i0].clone() - v[j].clone();
                    if minv[j].as_ref().is_none_or(|mj| cur < *mj) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(mj) = &minv[j] {
                    if delta.as_ref().is_none_or(|d| mj < d) {
                        delta = Some(mj.clone());
                        j1 = j;
                    }
                }
            }
            let delta = delta?;
            for j in 0..=m {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(mj) = minv[j].as_mut() {
                    *mj = mj.clone() - delta.clone();
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    let total = assignment.iter().enumerate().fold(W::zero(), |acc, (i, &j)| {
        acc + cost[i][j].clone().expect("assignment uses allowed edges")
    });
    Some((total, assignment))
}

/// Optimal assignment on a square matrix of p-cost weights: minimum sum for
/// finite `p`, minimum maximum for `p = inf`.
pub fn solve_weighted(weights: &[Vec<Option<Weight>>], p: Exponent) -> Option<Vec<usize>> {
    match p {
        Exponent::Integer(_) => {
            let exact: Vec<Vec<Option<Rational>>> = weights
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|w| {
                            w.as_ref().map(|w| match w {
                                Weight::Exact(r) => r.clone(),
                                Weight::Float(_) => unreachable!("integer exponent yields exact weights"),
                            })
                        })
                        .collect()
                })
                .collect();
            hungarian(&exact).map(|(_, a)| a)
        }
        Exponent::Real(_) => {
            let float: Vec<Vec<Option<f64>>> =
                weights.iter().map(|r| r.iter().map(|w| w.as_ref().map(Weight::as_f64)).collect()).collect();
            hungarian(&float).map(|(_, a)| a)
        }
        Exponent::Infinity => bottleneck(weights),
    }
}

/// Smallest threshold admitting a perfect matching, found by bisection over
/// the distinct edge weights.
fn bottleneck(weights: &[Vec<Option<Weight>>]) -> Option<Vec<usize>> {
    if weights.is_empty() {
        return Some(Vec::new());
    }
    let mut levels: Vec<Weight> = weights.iter().flatten().flatten().cloned().collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    levels.dedup();
    let feasible = |t: &Weight| -> Option<Vec<usize>> {
        let mask: Vec<Vec<Option<i64>>> = weights
            .iter()
            .map(|r| r.iter().map(|w| w.as_ref().filter(|w| *w <= t).map(|_| 0)).collect())
            .collect();
        hungarian(&mask).map(|(_, a)| a)
    };
    feasible(levels.last()?)?;
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(&levels[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    feasible(&levels[lo])
}
