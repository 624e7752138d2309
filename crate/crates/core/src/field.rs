//! Dense linear algebra over prime fields GF(q), q <= 251.
//!
//! Elimination always takes the first nonzero entry in a column as pivot, so
//! ranks, inverses and membership coefficients are reproducible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_MODULUS: u32 = 251;

fn is_prime(q: u32) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

/// A prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Modulus(u32);

impl Modulus {
    pub fn new(q: u32) -> Result<Self> {
        if q <= MAX_MODULUS && is_prime(q) {
            Ok(Modulus(q))
        } else {
            Err(Error::BadModulus(q))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Reduces a signed integer into `[0, q)`.
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b) % self.0
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.0
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }

    /// Multiplicative inverse by Fermat; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0));
        let mut result = 1u32;
        let mut base = a % self.0;
        let mut e = self.0 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }
}

impl TryFrom<u32> for Modulus {
    type Error = Error;
    fn try_from(q: u32) -> Result<Self> {
        Modulus::new(q)
    }
}

impl From<Modulus> for u32 {
    fn from(m: Modulus) -> u32 {
        m.0
    }
}

/// An element of GF(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u32,
    modulus: Modulus,
}

impl FieldElem {
    pub fn new(value: i64, modulus: Modulus) -> Self {
        FieldElem { value: modulus.reduce(value), modulus }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl std::ops::Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        FieldElem { value: self.modulus.add(self.value, rhs.value), modulus: self.modulus }
    }
}

impl std::ops::Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
        FieldElem { value: self.modulus.mul(self.value, rhs.value), modulus: self.modulus }
    }
}

/// A vector over GF(q), stored as reduced residues.
pub type FieldVector = Vec<u32>;

/// Row-major dense matrix over GF(q).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    modulus: Modulus,
    entries: Vec<u32>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix {}x{} over GF({})", self.rows, self.cols, self.modulus.0)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: Modulus) -> Self {
        FieldMatrix { rows, cols, modulus, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, modulus: Modulus) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing each entry mod q.
    pub fn from_rows(modulus: Modulus, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows.iter().flatten().map(|&v| modulus.reduce(v)).collect();
        Ok(FieldMatrix { rows: rows.len(), cols, modulus, entries })
    }

    /// Builds a matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(modulus: Modulus, rows: usize, columns: &[FieldVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len(), modulus);
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch(format!("column {c} has length {}, expected {rows}", col.len())));
            }
            for (r, &v) in col.iter().enumerate() {
                m.set(r, c, v % modulus.0);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    pub fn elem(&self, r: usize, c: usize) -> FieldElem {
        FieldElem { value: self.get(r, c), modulus: self.modulus }
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.entries[r * self.cols + c] = v % self.modulus.0;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> FieldVector {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    pub fn mat_mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.0, other.modulus.0));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let q = self.modulus;
        let mut out = Self::zeros(self.rows, other.cols, q);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.entries[idx] = q.add(out.entries[idx], q.mul(a, other.get(k, c)));
                }
            }
        }
        Ok(out)
    }

    pub fn mat_vec(&self, v: &[u32]) -> Result<FieldVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("{} columns, vector of length {}", self.cols, v.len())));
        }
        let q = self.modulus;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(0, |acc, (&a, &b)| q.add(acc, q.mul(a, b % q.0))))
            .collect())
    }

    /// Reduces `self` to row echelon form in place and returns the pivot columns.
    fn eliminate(&mut self) -> Vec<usize> {
        let q = self.modulus;
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for c in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(r) = (pivot_row..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            self.swap_rows(r, pivot_row);
            let inv = q.inv(self.get(pivot_row, c));
            for j in c..self.cols {
                let v = q.mul(self.get(pivot_row, j), inv);
                self.set(pivot_row, j, v);
            }
            for r2 in 0..self.rows {
                if r2 == pivot_row {
                    continue;
                }
                let factor = self.get(r2, c);
                if factor == 0 {
                    continue;
                }
                for j in c..self.cols {
                    let v = q.sub(self.get(r2, j), q.mul(factor, self.get(pivot_row, j)));
                    self.set(r2, j, v);
                }
            }
            pivots.push(c);
            pivot_row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate().len()
    }

    pub fn invert(&self) -> Result<FieldMatrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n, self.modulus);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let pivots = aug.eliminate();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::NotInvertible);
        }
        let mut inv = Self::zeros(n, n, self.modulus);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c));
            }
        }
        Ok(inv)
    }
}

/// Rank of the span of `vectors`, each of length `dim`.
pub fn span_rank(modulus: Modulus, dim: usize, vectors: &[FieldVector]) -> Result<usize> {
    Ok(FieldMatrix::from_columns(modulus, dim, vectors)?.rank())
}

/// Whether two families of vectors span the same subspace of GF(q)^dim.
pub fn same_span(modulus: Modulus, dim: usize, a: &[FieldVector], b: &[FieldVector]) -> Result<bool> {
    let ra = span_rank(modulus, dim, a)?;
    let rb = span_rank(modulus, dim, b)?;
    if ra != rb {
        return Ok(false);
    }
    let both: Vec<FieldVector> = a.iter().chain(b).cloned().collect();
    Ok(span_rank(modulus, dim, &both)? == ra)
}

/// Coefficients `c` with `sum c_i * basis_i = v`, or [`Error::NotInSpan`].
///
/// The basis need not be independent; free coefficients are set to zero.
pub fn solve_membership(modulus: Modulus, basis: &[FieldVector], v: &[u32]) -> Result<FieldVector> {
    let dim = v.len();
    if let Some((i, b)) = basis.iter().enumerate().find(|(_, b)| b.len() != dim) {
        return Err(Error::DimensionMismatch(format!("basis vector {i} has length {}, expected {dim}", b.len())));
    }
    let k = basis.len();
    let mut aug = FieldMatrix::zeros(dim, k + 1, modulus);
    for (c, b) in basis.iter().enumerate() {
        for (r, &x) in b.iter().enumerate() {
            aug.set(r, c, x);
        }
    }
    for (r, &x) in v.iter().enumerate() {
        aug.set(r, k, x);
    }
    let pivots = aug.eliminate();
    if pivots.last() == Some(&k) {
        return Err(Error::NotInSpan);
    }
    let mut coeffs = vec![0; k];
    for (row, &c) in pivots.iter().enumerate() {
        coeffs[c] = aug.get(row, k);
    }
    Ok(coeffs)
}
