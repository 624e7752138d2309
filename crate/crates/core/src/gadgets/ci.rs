//! 2-parameter modules from a constrained invertibility instance `(P, Q)`.
//!
//! Generator `g_{k,i}` (block `k` in `1..=K`, then the infinity block) has id
//! `(k - 1) n + (i - 1)`; the infinity block occupies ids `K n .. (K + 1) n`.
//! Relation `r_{k,i} = g_{k,i} - g_{inf,i}` has the id of `g_{k,i}`. `N` uses
//! the same layout for `h` and `s`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::{Cost, Exponent};
use crate::error::{Error, Result};
use crate::field::{span_rank, FieldMatrix, FieldVector, Modulus};
use crate::solvers::{verify_ci, CiSolution};
use crate::two_param::{dp_cost2, Grade2, ModuleGenerator, ModuleRelation, Regeneration, TwoParamPresentation};

use super::separation_constant;

/// Zero pattern: `true` is `*`, `false` is `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern(pub Vec<Vec<bool>>);

impl Pattern {
    pub fn parse(rows: &[&str]) -> Result<Self> {
        rows.iter()
            .map(|r| r.split_whitespace().map(parse_entry).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map(Pattern)
    }

    pub fn all_stars(n: usize) -> Self {
        Pattern(vec![vec![true; n]; n])
    }

    pub fn is_star(&self, i: usize, j: usize) -> bool {
        self.0[i][j]
    }

    /// Zero positions in row-major order.
    pub fn zeros(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.0.iter().enumerate() {
            for (j, &star) in row.iter().enumerate() {
                if !star {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn star_count(&self) -> usize {
        self.0.iter().flatten().filter(|&&s| s).count()
    }

    /// Whether `m` is zero wherever the pattern is.
    pub fn admits(&self, m: &FieldMatrix) -> bool {
        self.zeros().into_iter().all(|(i, j)| m.get(i, j) == 0)
    }
}

fn parse_entry(s: &str) -> Result<bool> {
    match s.trim() {
        "*" => Ok(true),
        "0" => Ok(false),
        t => Err(Error::Parse(format!("pattern entry must be \"*\" or \"0\", got {t:?}"))),
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<&str>> = self.0.iter().map(|r| r.iter().map(|&b| if b { "*" } else { "0" }).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.iter()
            .map(|r| r.iter().map(|e| parse_entry(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map(Pattern)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiInstance {
    pub n: usize,
    #[serde(rename = "P")]
    pub p: Pattern,
    #[serde(rename = "Q")]
    pub q: Pattern,
}

impl CiInstance {
    pub fn new(p: Pattern, q: Pattern) -> Result<Self> {
        let inst = CiInstance { n: p.0.len(), p, q };
        inst.validate()?;
        Ok(inst)
    }

    /// The solvable worked example (`index = 1`) or the unsolvable one (`index = 2`).
    pub fn worked_example(index: u32) -> Result<Self> {
        let (p, q) = match index {
            1 => (["* * *", "* 0 *", "* * 0"], ["* * *", "* * 0", "* 0 *"]),
            2 => (["0 * 0", "* * *", "* * *"], ["* * *", "0 * *", "* * *"]),
            _ => return Err(Error::InvalidInstance(format!("no worked example {index}"))),
        };
        CiInstance::new(Pattern::parse(&p)?, Pattern::parse(&q)?)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 2 {
            return Err(Error::InvalidInstance(format!("dimension n = {n} must be at least 2")));
        }
        for (name, pat) in [("P", &self.p), ("Q", &self.q)] {
            if pat.0.len() != n || pat.0.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInstance(format!("pattern {name} is not {n}x{n}")));
            }
        }
        Ok(())
    }

    /// Zeros of `P` row-major, then zeros of `Q` row-major.
    pub fn zeros(&self) -> Vec<Zero> {
        let tag = |kind| move |(row, col)| Zero { kind, row, col };
        self.p.zeros().into_iter().map(tag(ZeroKind::P)).chain(self.q.zeros().into_iter().map(tag(ZeroKind::Q))).collect()
    }

    /// Total number of zeros `K`.
    pub fn zero_count(&self) -> usize {
        self.p.zeros().len() + self.q.zeros().len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroKind {
    P,
    Q,
}

/// A zero at 0-based `(row, col)` of pattern `kind`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zero {
    pub kind: ZeroKind,
    pub row: usize,
    pub col: usize,
}

impl fmt::Display for Zero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{},{}]", self.kind, self.row + 1, self.col + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub zero: Zero,
    pub point: Grade2,
}

/// Anchor points `(5i - 5K - 3, -5i - 5K)` for `i` in `-K..=K`: even `x` for
/// zeros of `P`, odd `x` for zeros of `Q`, each taking the smallest unused `i`.
pub fn anchors(inst: &CiInstance) -> Vec<Anchor> {
    let k = inst.zero_count() as i64;
    let point = |i: i64| Grade2::ints(5 * i - 5 * k - 3, -5 * i - 5 * k);
    let x_is_even = |i: i64| (5 * i - 5 * k - 3).rem_euclid(2) == 0;
    let mut even = (-k..=k).filter(|&i| x_is_even(i));
    let mut odd = (-k..=k).filter(|&i| !x_is_even(i));
    inst.zeros()
        .into_iter()
        .map(|zero| {
            let i = match zero.kind {
                ZeroKind::P => even.next(),
                ZeroKind::Q => odd.next(),
            }
            .expect("-K..=K has at least K indices of each parity");
            Anchor { zero, point: point(i) }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiGadget {
    pub m: TwoParamPresentation,
    pub n: TwoParamPresentation,
    pub c: i64,
    pub anchors: Vec<Anchor>,
}

impl CiGadget {
    pub fn dimension(&self) -> usize {
        self.m.generators().len() / (self.anchors.len() + 1)
    }

    /// Grade `(C, C)`.
    pub fn top(&self) -> Grade2 {
        Grade2::ints(self.c, self.c)
    }
}

/// Offsets of block `k`'s generators from its anchor, for `(M, N)`.
fn block_offsets(zero: &Zero, n: usize) -> (Vec<i64>, Vec<i64>) {
    let near = |special: usize| (0..n).map(|i| if i == special { 0 } else { 2 }).collect::<Vec<_>>();
    let far = |special: usize| (0..n).map(|i| if i == special { 3 } else { 1 }).collect::<Vec<_>>();
    match zero.kind {
        ZeroKind::P => (near(zero.col), far(zero.row)),
        ZeroKind::Q => (far(zero.row), near(zero.col)),
    }
}

fn presentation(
    modulus: Modulus,
    grades: Vec<Grade2>,
    relations: Vec<(u32, FieldVector)>,
    top: &Grade2,
) -> Result<TwoParamPresentation> {
    let generators = grades.into_iter().enumerate().map(|(id, grade)| ModuleGenerator { id: id as u32, grade }).collect();
    let relations = relations.into_iter().map(|(id, coeffs)| ModuleRelation { id, coeffs, grade: top.clone() }).collect();
    TwoParamPresentation::new(modulus, generators, relations)
}

/// Relation vectors `e_{k,i} - e_{inf,i}` in gadget id order.
fn gadget_relations(modulus: Modulus, k: usize, n: usize) -> Vec<(u32, FieldVector)> {
    let total = (k + 1) * n;
    (0..k * n)
        .map(|idx| {
            let mut v = vec![0; total];
            v[idx] = 1;
            v[k * n + idx % n] = modulus.neg(1);
            (idx as u32, v)
        })
        .collect()
}

pub fn build_ci_modules(inst: &CiInstance, p: Exponent, modulus: Modulus) -> Result<CiGadget> {
    inst.validate()?;
    let n = inst.n;
    let anchors = anchors(inst);
    let k = anchors.len();
    let c = separation_constant((k * n + 1) as u64, p);
    let top = Grade2::ints(c, c);
    let mut m_grades = Vec::with_capacity((k + 1) * n);
    let mut n_grades = Vec::with_capacity((k + 1) * n);
    for a in &anchors {
        let (dm, dn) = block_offsets(&a.zero, n);
        m_grades.extend(dm.iter().map(|&d| a.point.shifted(d, 0)));
        n_grades.extend(dn.iter().map(|&d| a.point.shifted(d, 0)));
    }
    m_grades.extend(std::iter::repeat_n(top.clone(), n));
    n_grades.extend(std::iter::repeat_n(top.clone(), n));
    let relations = gadget_relations(modulus, k, n);
    Ok(CiGadget {
        m: presentation(modulus, m_grades, relations.clone(), &top)?,
        n: presentation(modulus, n_grades, relations, &top)?,
        c,
        anchors,
    })
}

#[derive(Clone, Debug)]
pub struct CiCertificate {
    pub gadget: CiGadget,
    /// `P'_M`, a regeneration of `P_M` through `iota_m`.
    pub pm: TwoParamPresentation,
    /// `P'_N`, a regeneration of `P_N` through `iota_n`.
    pub pn: TwoParamPresentation,
    pub iota_m: FieldMatrix,
    pub iota_n: FieldMatrix,
    /// `iota_n^-1 phi iota_m`.
    pub sigma: FieldMatrix,
    pub cost: Cost,
}

impl CiCertificate {
    pub fn regeneration_m(&self) -> Regeneration<Grade2> {
        Regeneration { source: self.gadget.m.clone(), target: self.pm.clone(), iota: self.iota_m.clone() }
    }

    pub fn regeneration_n(&self) -> Regeneration<Grade2> {
        Regeneration { source: self.gadget.n.clone(), target: self.pn.clone(), iota: self.iota_n.clone() }
    }
}

/// Block-diagonal copy of `block` on `blocks` consecutive `n`-blocks.
fn block_diagonal(block: &FieldMatrix, blocks: usize) -> FieldMatrix {
    let n = block.rows();
    let mut out = FieldMatrix::zeros(n * blocks, n * blocks, block.modulus());
    for b in 0..blocks {
        for i in 0..n {
            for j in 0..n {
                out.set(b * n + i, b * n + j, block.get(i, j));
            }
        }
    }
    out
}

fn unit(n: usize, i: usize) -> FieldVector {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Ordered bases `(near, far)` of one block for a zero at `(a, b)`, where
/// `forward` maps the near side (the one with a generator at the anchor) to
/// the far side and `backward` is its inverse.
///
/// `far[0] = forward e_b`, `far[1..n-1]` completes it greedily to a basis of
/// `span{e_i : i != a}`, `far[n-1] = e_a`, and `near = backward far`.
fn block_bases(forward: &FieldMatrix, backward: &FieldMatrix, a: usize, b: usize) -> Result<(Vec<FieldVector>, Vec<FieldVector>)> {
    let n = forward.rows();
    let q = forward.modulus();
    let first = forward.column(b);
    if first[a] != 0 {
        return Err(Error::SolutionInvalid(format!("entry ({}, {}) must vanish", a + 1, b + 1)));
    }
    let mut far = vec![first];
    for i in (0..n).filter(|&i| i != a) {
        if far.len() == n - 1 {
            break;
        }
        let mut candidate = far.clone();
        candidate.push(unit(n, i));
        if span_rank(q, n, &candidate)? == candidate.len() {
            far = candidate;
        }
    }
    far.push(unit(n, a));
    let near = far.iter().map(|v| backward.mat_vec(v)).collect::<Result<Vec<_>>>()?;
    Ok((near, far))
}

/// Presentations of `M` and `N` that are compatible through `sigma = I` at
/// cost `(K n)^(1/p)`, built from a solution `(A, B)`.
pub fn ci_certificate(inst: &CiInstance, solution: &CiSolution, p: Exponent) -> Result<CiCertificate> {
    inst.validate()?;
    if !verify_ci(inst, solution)? {
        return Err(Error::SolutionInvalid("(A, B) is not a solution of the instance".into()));
    }
    let modulus = solution.a.modulus();
    let gadget = build_ci_modules(inst, p, modulus)?;
    let n = inst.n;
    let k = gadget.anchors.len();
    let total = (k + 1) * n;
    let (a_mat, b_mat) = (&solution.a, &solution.b);

    let mut m_cols: Vec<FieldVector> = Vec::with_capacity(total);
    let mut n_cols: Vec<FieldVector> = Vec::with_capacity(total);
    let mut m_grades = Vec::with_capacity(total);
    let mut n_grades = Vec::with_capacity(total);
    let embed = |block: usize, v: &FieldVector| {
        let mut out = vec![0; total];
        out[block * n..(block + 1) * n].copy_from_slice(v);
        out
    };
    for (blk, anchor) in gadget.anchors.iter().enumerate() {
        let Zero { kind, row, col } = anchor.zero;
        let pt = &anchor.point;
        let near_grades: Vec<Grade2> = (0..n).map(|i| pt.shifted(if i == 0 { 0 } else { 2 }, 0)).collect();
        let far_grades: Vec<Grade2> = (0..n).map(|i| pt.shifted(if i + 1 < n { 1 } else { 3 }, 0)).collect();
        let (m_basis, n_basis, mg, ng) = match kind {
            ZeroKind::P => {
                let (near, far) = block_bases(a_mat, b_mat, row, col)?;
                (near, far, near_grades, far_grades)
            }
            ZeroKind::Q => {
                let (near, far) = block_bases(b_mat, a_mat, row, col)?;
                (far, near, far_grades, near_grades)
            }
        };
        m_cols.extend(m_basis.iter().map(|v| embed(blk, v)));
        n_cols.extend(n_basis.iter().map(|v| embed(blk, v)));
        m_grades.extend(mg);
        n_grades.extend(ng);
    }
    // Infinity block: iota_N follows phi so that sigma fixes it.
    for i in 0..n {
        m_cols.push(embed(k, &unit(n, i)));
        n_cols.push(embed(k, &a_mat.column(i)));
    }
    m_grades.extend(std::iter::repeat_n(gadget.top(), n));
    n_grades.extend(std::iter::repeat_n(gadget.top(), n));

    let iota_m = FieldMatrix::from_columns(modulus, total, &m_cols)?;
    let iota_n = FieldMatrix::from_columns(modulus, total, &n_cols)?;
    let (iota_m_inv, iota_n_inv) = (iota_m.invert()?, iota_n.invert()?);
    let phi = block_diagonal(a_mat, k + 1);

    let mut rel_m = Vec::with_capacity(k * n);
    let mut rel_n = Vec::with_capacity(k * n);
    for r in gadget.m.relations() {
        rel_m.push((r.id, iota_m_inv.mat_vec(&r.coeffs)?));
        rel_n.push((r.id, iota_n_inv.mat_vec(&phi.mat_vec(&r.coeffs)?)?));
    }
    let top = gadget.top();
    let pm = presentation(modulus, m_grades, rel_m, &top)?;
    let pn = presentation(modulus, n_grades, rel_n, &top)?;
    let sigma = iota_n_inv.mat_mul(&phi)?.mat_mul(&iota_m)?;
    let cost = dp_cost2(&pm, &pn, &sigma, p)?;
    Ok(CiCertificate { gadget, pm, pn, iota_m, iota_n, sigma, cost })
}
