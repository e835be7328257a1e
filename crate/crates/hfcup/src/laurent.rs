//! Matrices over `F_2[U, U^-1]`.
//!
//! An entry is a finite set of integer exponents: the Laurent polynomial
//! `U^{k_1} + ... + U^{k_m}` over `F_2`. Addition is symmetric difference,
//! so the empty set is zero and every representation is canonical.
//!
//! `F_2[U, U^-1]` is a principal ideal domain; the rank of a matrix over its
//! fraction field equals the rank of the free module map it represents,
//! which is what the mapping-cone rank formula consumes.

use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::IntMatrix;
use crate::{Error, Result};

/// A Laurent polynomial over `F_2`, as its set of exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct LaurentPolyF2(BTreeSet<i64>);

impl LaurentPolyF2 {
    pub fn zero() -> Self {
        LaurentPolyF2(BTreeSet::new())
    }

    pub fn one() -> Self {
        LaurentPolyF2::monomial(0)
    }

    /// The monomial `U^k`.
    pub fn monomial(k: i64) -> Self {
        LaurentPolyF2(BTreeSet::from([k]))
    }

    pub fn from_exponents(exps: &[i64]) -> Self {
        let mut p = LaurentPolyF2::zero();
        for &e in exps {
            p.toggle(e);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0.contains(&0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }

    fn toggle(&mut self, e: i64) {
        if !self.0.remove(&e) {
            self.0.insert(e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &e in &other.0 {
            out.toggle(e);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPolyF2::zero();
        for &a in &self.0 {
            for &b in &other.0 {
                out.toggle(a + b);
            }
        }
        out
    }

    /// Multiplication by the unit `U^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPolyF2(self.0.iter().map(|e| e + k).collect())
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.0.first().copied()
    }
}

/// Matrix over `F_2[U, U^-1]`, dense, row-major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LaurentMatrixF2 {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPolyF2>,
}

impl LaurentMatrixF2 {
    pub fn zero(rows: usize, cols: usize) -> Self {
        LaurentMatrixF2 {
            rows,
            cols,
            entries: vec![LaurentPolyF2::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = LaurentMatrixF2::zero(n, n);
        for i in 0..n {
            m[(i, i)] = LaurentPolyF2::one();
        }
        m
    }

    /// Constant matrix from 0/1 rows; meant for literals.
    pub fn from_bits(rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let entries = rows
            .iter()
            .flatten()
            .map(|&b| {
                if b % 2 == 1 {
                    LaurentPolyF2::one()
                } else {
                    LaurentPolyF2::zero()
                }
            })
            .collect();
        LaurentMatrixF2 {
            rows: r,
            cols: c,
            entries,
        }
    }

    /// Mod-2 reduction of an integer matrix, embedded as constants.
    pub fn embed_mod2(m: &IntMatrix) -> Self {
        use num_integer::Integer;
        let mut out = LaurentMatrixF2::zero(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)].is_odd() {
                    out[(i, j)] = LaurentPolyF2::one();
                }
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPolyF2::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(LaurentMatrixF2 {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = LaurentMatrixF2::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = self[(i, k)].mul(&other[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&prod);
                }
            }
        }
        Ok(out)
    }

    /// Scales row `i` by the unit `U^k`; rank-preserving.
    pub fn shift_row(&mut self, i: usize, k: i64) {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)].shift(k);
        }
    }

    pub fn shift_col(&mut self, j: usize, k: i64) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)].shift(k);
        }
    }

    /// Rank over the fraction field `F_2(U)`.
    ///
    /// Gaussian elimination by cross-multiplication: replacing `row_i` with
    /// `pivot * row_i + entry * row_pivot` scales the row by a nonzero
    /// element of the domain, so the rank is unchanged and the arithmetic
    /// stays in `F_2[U, U^-1]`.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            for r in rank + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let p = m[(rank, col)].clone();
                let q = m[(r, col)].clone();
                for j in col..m.cols {
                    let scaled = m[(r, j)].mul(&p);
                    let folded = m[(rank, j)].mul(&q);
                    m[(r, j)] = scaled.add(&folded);
                }
                // Normalize by a unit to keep exponents small.
                if let Some(min) = (col..m.cols)
                    .filter_map(|j| m[(r, j)].min_exponent())
                    .min()
                {
                    if min != 0 {
                        for j in col..m.cols {
                            m[(r, j)] = m[(r, j)].shift(-min);
                        }
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for LaurentMatrixF2 {
    type Output = LaurentPolyF2;
    fn index(&self, (i, j): (usize, usize)) -> &LaurentPolyF2 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for LaurentMatrixF2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut LaurentPolyF2 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl std::fmt::Debug for LaurentMatrixF2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "LaurentMatrixF2 {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let exps: Vec<String> =
                        self[(i, j)].exponents().map(|e| format!("U^{e}")).collect();
                    if exps.is_empty() {
                        "0".into()
                    } else {
                        exps.join("+")
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for LaurentMatrixF2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<Vec<i64>>>,
        }
        let entries = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)].exponents().collect())
                    .collect()
            })
            .collect();
        Repr {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentMatrixF2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<Vec<i64>>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.entries.len() != repr.rows
            || repr.entries.iter().any(|row| row.len() != repr.cols)
        {
            return Err(D::Error::custom("entries do not match rows x cols"));
        }
        let entries = repr
            .entries
            .iter()
            .flatten()
            .map(|exps| LaurentPolyF2::from_exponents(exps))
            .collect();
        Ok(LaurentMatrixF2 {
            rows: repr.rows,
            cols: repr.cols,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank_f2, IntMatrix};

    #[test]
    fn poly_arithmetic() {
        let a = LaurentPolyF2::from_exponents(&[0, 1]);
        let b = LaurentPolyF2::from_exponents(&[1, -2]);
        assert_eq!(a.add(&b), LaurentPolyF2::from_exponents(&[0, -2]));
        // (1 + U)(U + U^-2) = U + U^-2 + U^2 + U^-1
        assert_eq!(a.mul(&b), LaurentPolyF2::from_exponents(&[1, -2, 2, -1]));
        // (1 + U)^2 = 1 + U^2 over F_2
        assert_eq!(a.mul(&a), LaurentPolyF2::from_exponents(&[0, 2]));
        assert!(a.add(&a).is_zero());
    }

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(LaurentMatrixF2::identity(4).rank(), 4);
        assert_eq!(LaurentMatrixF2::zero(3, 5).rank(), 0);
    }

    #[test]
    fn rank_unit_plus_one() {
        // (U + 1) I has full rank: U + 1 is nonzero in the domain.
        let mut m = LaurentMatrixF2::identity(4);
        for i in 0..4 {
            m[(i, i)] = LaurentPolyF2::from_exponents(&[0, 1]);
        }
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn rank_dependent_rows() {
        // Second row is U times the first.
        let mut m = LaurentMatrixF2::zero(2, 2);
        m[(0, 0)] = LaurentPolyF2::one();
        m[(0, 1)] = LaurentPolyF2::from_exponents(&[0, 1]);
        m[(1, 0)] = LaurentPolyF2::monomial(1);
        m[(1, 1)] = LaurentPolyF2::from_exponents(&[1, 2]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_invariant_under_unit_scaling() {
        let mut m = LaurentMatrixF2::from_bits(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        let before = m.rank();
        m.shift_row(0, 3);
        m.shift_col(2, -5);
        assert_eq!(m.rank(), before);
    }

    #[test]
    fn rank_agrees_with_f2_on_constants() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..50 {
            let rows = (next() % 5 + 1) as usize;
            let cols = (next() % 5 + 1) as usize;
            let mut m = IntMatrix::zero(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m[(i, j)] = num_bigint::BigInt::from((next() % 19) as i64 - 9);
                }
            }
            assert_eq!(LaurentMatrixF2::embed_mod2(&m).rank(), rank_f2(&m));
        }
    }

    #[test]
    fn json_roundtrip() {
        let mut m = LaurentMatrixF2::identity(2);
        m[(0, 1)] = LaurentPolyF2::from_exponents(&[-1, 3]);
        let s = serde_json::to_string(&m).unwrap();
        let back: LaurentMatrixF2 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
