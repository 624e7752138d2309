//! Merge trees from a balanced partition instance `(S, k)`.
//!
//! `M` has one generator per unit of every `s_i`, all at `-C`, chained into
//! blocks of size `s_i` at grade 0 and the blocks chained at grade 2. `N` is
//! the same with blocks of size `n / k` at grades 1 and 3.

use serde::{Deserialize, Serialize};

use crate::cost::{Cost, Exponent};
use crate::error::{Error, Result};
use crate::merge_tree::{dp_cost, Bijection, Generator, MergeTreePresentation, Relation};
use crate::rational::int;
use crate::solvers::{verify_balpart, BalPartSolution};

use super::separation_constant;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalPartInstance {
    #[serde(rename = "S")]
    pub sizes: Vec<u64>,
    pub k: usize,
}

impl BalPartInstance {
    pub fn new(sizes: Vec<u64>, k: usize) -> Result<Self> {
        let inst = BalPartInstance { sizes, k };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if self.sizes.contains(&0) {
            return bad("sizes must be positive".into());
        }
        if self.k == 0 || self.k > self.m() {
            return bad(format!("bin count k = {} must lie in 1..={}", self.k, self.m()));
        }
        let n = self.n();
        if n < 2 {
            return bad(format!("total size n = {n} must be at least 2"));
        }
        if !n.is_multiple_of(self.k as u64) {
            return bad(format!("total size n = {n} is not divisible by k = {}", self.k));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn n(&self) -> u64 {
        self.sizes.iter().sum()
    }

    /// Target bin sum `n / k`.
    pub fn bin_sum(&self) -> u64 {
        self.n() / self.k as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalPartTrees {
    pub m: MergeTreePresentation,
    pub n: MergeTreePresentation,
    pub c: i64,
}

/// A path on generators `0..len` at `-c`; edge `t` joins `t` and `t + 1` at `grade(t)`.
fn chain(len: usize, c: i64, grade: impl Fn(usize) -> i64) -> MergeTreePresentation {
    let generators = (0..len as u32).map(|id| Generator { id, grade: int(-c) }).collect();
    let relations = (0..len.saturating_sub(1) as u32)
        .map(|t| Relation { id: t, ends: [t, t + 1], grade: int(grade(t as usize)) })
        .collect();
    MergeTreePresentation::new(generators, relations).expect("chains are valid presentations")
}

/// `true` at position `t` when generators `t` and `t + 1` lie in different blocks.
fn block_boundaries(blocks: impl IntoIterator<Item = u64>) -> Vec<bool> {
    let mut out = Vec::new();
    for size in blocks {
        out.extend(std::iter::repeat_n(false, size as usize - 1));
        out.push(true);
    }
    out.pop();
    out
}

pub fn build_balpart_trees(inst: &BalPartInstance, p: Exponent) -> Result<BalPartTrees> {
    inst.validate()?;
    let n = inst.n() as usize;
    let c = separation_constant(inst.n(), p);
    let m_cut = block_boundaries(inst.sizes.iter().copied());
    let n_cut = block_boundaries(std::iter::repeat_n(inst.bin_sum(), inst.k));
    Ok(BalPartTrees {
        m: chain(n, c, |t| if m_cut[t] { 2 } else { 0 }),
        n: chain(n, c, |t| if n_cut[t] { 3 } else { 1 }),
        c,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalPartCertificate {
    pub p: MergeTreePresentation,
    pub q: MergeTreePresentation,
    pub sigma: Bijection,
    /// Element indices of `S` in the order their generators appear.
    pub element_order: Vec<usize>,
    pub cost: Cost,
}

/// Compatible presentations of `M` and `N` whose identity bijection costs
/// `(n - 1)^(1/p)`, built from a balanced partition.
pub fn balpart_certificate(inst: &BalPartInstance, solution: &BalPartSolution, p: Exponent) -> Result<BalPartCertificate> {
    inst.validate()?;
    if !verify_balpart(inst, solution) {
        return Err(Error::SolutionInvalid("bins do not all sum to n / k".into()));
    }
    let mut element_order: Vec<usize> = (0..inst.m()).collect();
    element_order.sort_by_key(|&i| (solution.assignment[i], i));

    let n = inst.n() as usize;
    let c = separation_constant(inst.n(), p);
    let p_cut = block_boundaries(element_order.iter().map(|&i| inst.sizes[i]));
    let q_cut = block_boundaries(std::iter::repeat_n(inst.bin_sum(), inst.k));
    let pp = chain(n, c, |t| if p_cut[t] { 2 } else { 0 });
    let qq = chain(n, c, |t| if q_cut[t] { 3 } else { 1 });
    let sigma = Bijection::identity(&pp);
    let cost = dp_cost(&pp, &qq, &sigma, p)?;
    Ok(BalPartCertificate { p: pp, q: qq, sigma, element_order, cost })
}
