//! Exhaustive search for the two source problems at desk scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldMatrix, FieldVector, Modulus};
use crate::gadgets::{BalPartInstance, CiInstance};

/// Largest `m` searched by [`solve_balpart`] unless overridden.
pub const DEFAULT_BALPART_LIMIT: u64 = 20;
/// Largest `q^stars` searched by [`solve_ci`] unless overridden.
pub const DEFAULT_CI_LIMIT: u64 = 1 << 24;

/// `assignment[i]` is the bin of `s_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalPartSolution {
    pub assignment: Vec<usize>,
}

pub fn verify_balpart(inst: &BalPartInstance, sol: &BalPartSolution) -> bool {
    if sol.assignment.len() != inst.m() || sol.assignment.iter().any(|&b| b >= inst.k) {
        return false;
    }
    let mut sums = vec![0u64; inst.k];
    for (&b, &s) in sol.assignment.iter().zip(&inst.sizes) {
        sums[b] += s;
    }
    sums.iter().all(|&s| s == inst.bin_sum())
}

/// First solution in lexicographic order of `assignment`, or `None`.
pub fn solve_balpart(inst: &BalPartInstance, limit: u64) -> Result<Option<BalPartSolution>> {
    inst.validate()?;
    if inst.m() as u64 > limit {
        return Err(Error::SizeLimitExceeded(format!("m = {} exceeds the limit of {limit}", inst.m())));
    }
    let target = inst.bin_sum();
    let mut sums = vec![0u64; inst.k];
    let mut assignment = Vec::with_capacity(inst.m());

    // The lexicographically first solution opens bins in order 0, 1, 2, ...,
    // so restricting new bins to `used` loses nothing.
    fn search(sizes: &[u64], target: u64, sums: &mut [u64], assignment: &mut Vec<usize>, used: usize) -> bool {
        let i = assignment.len();
        if i == sizes.len() {
            return sums.iter().all(|&s| s == target);
        }
        for b in 0..sums.len().min(used + 1) {
            if sums[b] + sizes[i] > target {
                continue;
            }
            sums[b] += sizes[i];
            assignment.push(b);
            if search(sizes, target, sums, assignment, used.max(b + 1)) {
                return true;
            }
            assignment.pop();
            sums[b] -= sizes[i];
        }
        false
    }

    Ok(search(&inst.sizes, target, &mut sums, &mut assignment, 0).then_some(BalPartSolution { assignment }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiSolution {
    pub a: FieldMatrix,
    pub b: FieldMatrix,
}

#[derive(Serialize, Deserialize)]
struct CiSolutionJson {
    #[serde(rename = "A")]
    a: Vec<Vec<i64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<i64>>,
    q: u32,
}

impl Serialize for CiSolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = |m: &FieldMatrix| m.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect();
        CiSolutionJson { a: rows(&self.a), b: rows(&self.b), q: self.a.modulus().get() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CiSolution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CiSolutionJson::deserialize(d)?;
        let q = Modulus::new(raw.q).map_err(D::Error::custom)?;
        let a = FieldMatrix::from_rows(q, &raw.a).map_err(D::Error::custom)?;
        let b = FieldMatrix::from_rows(q, &raw.b).map_err(D::Error::custom)?;
        Ok(CiSolution { a, b })
    }
}

/// Whether `A B = I` and both zero patterns are respected.
pub fn verify_ci(inst: &CiInstance, sol: &CiSolution) -> Result<bool> {
    let n = inst.n;
    for m in [&sol.a, &sol.b] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!("solution matrix is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
        }
    }
    Ok(sol.a.mat_mul(&sol.b)?.is_identity() && inst.p.admits(&sol.a) && inst.q.admits(&sol.b))
}

/// Searches invertible `A` respecting `P`, column by column with the star
/// entries of each column counted upward row by row, and tests `A^-1`
/// against `Q`. Returns the first hit.
pub fn solve_ci(inst: &CiInstance, modulus: Modulus, limit: u64) -> Result<Option<CiSolution>> {
    inst.validate()?;
    let n = inst.n;
    let q = modulus.get() as u64;
    let stars = inst.p.star_count();
    let space = (0..stars).try_fold(1u64, |acc, _| acc.checked_mul(q).filter(|&v| v <= limit));
    if space.is_none() {
        return Err(Error::SizeLimitExceeded(format!("{}^{stars} candidate matrices exceeds the limit of {limit}", q)));
    }
    let columns: Vec<Vec<usize>> = (0..n).map(|j| (0..n).filter(|&i| inst.p.is_star(i, j)).collect()).collect();
    let mut chosen: Vec<FieldVector> = Vec::with_capacity(n);
    let mut echelon = Echelon::new(modulus, n);
    Ok(search_ci(inst, modulus, &columns, &mut chosen, &mut echelon))
}

fn search_ci(
    inst: &CiInstance,
    modulus: Modulus,
    columns: &[Vec<usize>],
    chosen: &mut Vec<FieldVector>,
    echelon: &mut Echelon,
) -> Option<CiSolution> {
    let n = inst.n;
    let j = chosen.len();
    if j == n {
        let a = FieldMatrix::from_columns(modulus, n, chosen).expect("square");
        let b = a.invert().expect("independent columns");
        return inst.q.admits(&b).then_some(CiSolution { a, b });
    }
    let rows = &columns[j];
    let mut digits = vec![0u32; rows.len()];
    loop {
        // Next value of this column's star entries, last row fastest.
        let pos = digits.iter().rposition(|&d| d + 1 < modulus.get())?;
        digits[pos] += 1;
        digits[pos + 1..].iter_mut().for_each(|d| *d = 0);
        let mut col = vec![0u32; n];
        for (&r, &d) in rows.iter().zip(&digits) {
            col[r] = d;
        }
        if let Some(saved) = echelon.try_insert(&col) {
            chosen.push(col);
            if let Some(sol) = search_ci(inst, modulus, columns, chosen, echelon) {
                return Some(sol);
            }
            chosen.pop();
            echelon.restore(saved);
        }
    }
}

/// Incrementally maintained row-echelon basis for independence tests.
struct Echelon {
    modulus: Modulus,
    /// `(pivot, vector)` with the pivot entry normalized to 1.
    rows: Vec<(usize, FieldVector)>,
    dim: usize,
}

impl Echelon {
    fn new(modulus: Modulus, dim: usize) -> Self {
        Echelon { modulus, rows: Vec::new(), dim }
    }

    /// Adds `v` if it is independent, returning the prior size for `restore`.
    fn try_insert(&mut self, v: &[u32]) -> Option<usize> {
        let q = self.modulus;
        let mut w = v.to_vec();
        for (pivot, row) in &self.rows {
            let c = w[*pivot];
            if c != 0 {
                for (x, &y) in w.iter_mut().zip(row) {
                    *x = q.sub(*x, q.mul(c, y));
                }
            }
        }
        let pivot = (0..self.dim).find(|&i| w[i] != 0)?;
        let inv = q.inv(w[pivot]);
        w.iter_mut().for_each(|x| *x = q.mul(*x, inv));
        self.rows.push((pivot, w));
        Some(self.rows.len() - 1)
    }

    fn restore(&mut self, len: usize) {
        self.rows.truncate(len);
    }
}
