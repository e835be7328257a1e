//! Exact integer linear algebra: dense matrices over arbitrary-precision
//! integers, Smith normal form with unimodular transforms, rank of the mod-2
//! reduction, and unimodular congruence.
//!
//! Smith normal form is the workhorse behind both the integral homology of
//! the cup complex and the discriminant-group computations, so it is pinned
//! down deterministically: the pivot is always the entry of smallest nonzero
//! absolute value in the remaining submatrix, ties broken by lowest
//! `(row, col)`, and the final diagonal is normalized to be nonnegative.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::jsonnum::JsonInt;
use crate::{Error, Result};

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zero(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Panics if the rows are
    /// ragged; meant for literals in code and tests.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            entries: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
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

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows)
            .all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Diagonal entries, up to `min(rows, cols)`.
    pub fn diagonal_entries(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    /// Orthogonal direct sum: block diagonal of `self` and `other`.
    pub fn direct_sum(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zero(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Copy of the submatrix with the given row and column ranges.
    pub fn submatrix(&self, row0: usize, row1: usize, col0: usize, col1: usize) -> IntMatrix {
        assert!(row0 <= row1 && row1 <= self.rows && col0 <= col1 && col1 <= self.cols);
        let mut out = IntMatrix::zero(row1 - row0, col1 - col0);
        for i in row0..row1 {
            for j in col0..col1 {
                out[(i - row0, j - col0)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row[dst] += q * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let add = q * &self[(src, c)];
            self[(dst, c)] += add;
        }
    }

    /// col[dst] += q * col[src]
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = q * &self[(r, src)];
            self[(r, dst)] += add;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self[(i, c)].clone();
            self[(i, c)] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = -self[(r, j)].clone();
            self[(r, j)] = v;
        }
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    // Bareiss: division by the previous pivot is exact.
                    a[(i, j)] = num / &prev;
                }
            }
            for i in k + 1..n {
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * a[(n - 1, n - 1)].clone())
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().map(|d| d.abs().is_one()).unwrap_or(false)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<&'a JsonIntRef<'a>>>,
        }
        // Serialize entry references without cloning the BigInts.
        struct JsonIntRef<'a>(&'a BigInt);
        impl Serialize for JsonIntRef<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                JsonInt(self.0.clone()).serialize(s)
            }
        }
        let wrapped: Vec<JsonIntRef> = self.entries.iter().map(JsonIntRef).collect();
        let entries: Vec<Vec<&JsonIntRef>> = (0..self.rows)
            .map(|i| wrapped[i * self.cols..(i + 1) * self.cols].iter().collect())
            .collect();
        Repr {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<JsonInt>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.entries.len() != repr.rows
            || repr.entries.iter().any(|row| row.len() != repr.cols)
        {
            return Err(D::Error::custom("entries do not match rows x cols"));
        }
        Ok(IntMatrix {
            rows: repr.rows,
            cols: repr.cols,
            entries: repr.entries.into_iter().flatten().map(|w| w.0).collect(),
        })
    }
}

/// Smith normal form `u * input * v = d`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    /// Diagonal matrix with the divisibility chain `d_1 | d_2 | ...`,
    /// entries nonnegative, zeros trailing.
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
    /// Diagonal entries greater than 1, in divisibility order.
    pub torsion_factors: Vec<BigInt>,
}

impl Serialize for SnfResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            d: &'a IntMatrix,
            u: &'a IntMatrix,
            v: &'a IntMatrix,
            rank: usize,
            torsion_factors: Vec<JsonInt>,
        }
        Repr {
            d: &self.d,
            u: &self.u,
            v: &self.v,
            rank: self.rank,
            torsion_factors: self.torsion_factors.iter().cloned().map(JsonInt).collect(),
        }
        .serialize(serializer)
    }
}

/// Smith normal form together with the inverses of the transforms,
/// accumulated during elimination so no matrix inversion is ever needed.
#[derive(Clone, Debug)]
pub(crate) struct SnfDecomposition {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

/// Pivot selection: smallest nonzero absolute value in the trailing
/// submatrix, ties broken by lowest `(row, col)`.
fn select_pivot(a: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in k..a.rows() {
        for j in k..a.cols() {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            let abs = v.abs();
            match &best {
                Some((b, _, _)) if *b <= abs => {}
                _ => best = Some((abs, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub(crate) fn snf_full(m: &IntMatrix) -> SnfDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // Row op `row[i] += q row[k]` keeps u * m * v = a when mirrored as
    // u.row[i] += q u.row[k] and u_inv.col[k] -= q u_inv.col[i];
    // column ops mirror into v / v_inv the same way.
    let mut k = 0;
    let lim = rows.min(cols);
    while k < lim {
        let Some((pi, pj)) = select_pivot(&a, k) else {
            break;
        };
        if pi != k {
            a.swap_rows(k, pi);
            u.swap_rows(k, pi);
            u_inv.swap_cols(k, pi);
        }
        if pj != k {
            a.swap_cols(k, pj);
            v.swap_cols(k, pj);
            v_inv.swap_rows(k, pj);
        }

        let mut cleared = true;
        for i in k + 1..rows {
            if a[(i, k)].is_zero() {
                continue;
            }
            let q = -(&a[(i, k)] / &a[(k, k)]);
            a.add_row_multiple(i, k, &q);
            u.add_row_multiple(i, k, &q);
            let neg_q = -q;
            u_inv.add_col_multiple(k, i, &neg_q);
            if !a[(i, k)].is_zero() {
                cleared = false;
            }
        }
        for j in k + 1..cols {
            if a[(k, j)].is_zero() {
                continue;
            }
            let q = -(&a[(k, j)] / &a[(k, k)]);
            a.add_col_multiple(j, k, &q);
            v.add_col_multiple(j, k, &q);
            let neg_q = -q;
            v_inv.add_row_multiple(k, j, &neg_q);
            if !a[(k, j)].is_zero() {
                cleared = false;
            }
        }
        if !cleared {
            // A nonzero remainder smaller than the pivot survives; re-pick.
            continue;
        }

        // The pivot must divide every entry of the trailing submatrix for
        // the divisibility chain to hold; fold an offending row in and redo.
        let mut offender = None;
        'scan: for i in k + 1..rows {
            for j in k + 1..cols {
                if !(&a[(i, j)] % &a[(k, k)]).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            let one = BigInt::one();
            a.add_row_multiple(k, i, &one);
            u.add_row_multiple(k, i, &one);
            let neg_one = -BigInt::one();
            u_inv.add_col_multiple(i, k, &neg_one);
            continue;
        }
        k += 1;
    }

    for i in 0..lim {
        if a[(i, i)].is_negative() {
            a.negate_row(i);
            u.negate_row(i);
            u_inv.negate_col(i);
        }
    }

    let rank = (0..lim).take_while(|&i| !a[(i, i)].is_zero()).count();
    SnfDecomposition {
        d: a,
        u,
        v,
        u_inv,
        v_inv,
        rank,
    }
}

/// Smith normal form of an integer matrix. Total and deterministic.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let dec = snf_full(m);
    let torsion_factors = (0..dec.rank)
        .map(|i| dec.d[(i, i)].clone())
        .filter(|d| !d.is_one())
        .collect();
    SnfResult {
        d: dec.d,
        u: dec.u,
        v: dec.v,
        rank: dec.rank,
        torsion_factors,
    }
}

/// Basis of the integer kernel of `m`, returned as the columns of a
/// `cols x nullity` matrix. The columns span a saturated sublattice.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let dec = snf_full(m);
    dec.v.submatrix(0, m.cols(), dec.rank, m.cols())
}

/// Rank of the mod-2 reduction, by Gaussian elimination over F_2 on
/// word-packed rows.
pub fn rank_f2(m: &IntMatrix) -> usize {
    let words = m.cols().div_ceil(64);
    let mut rows: Vec<Vec<u64>> = (0..m.rows())
        .map(|i| {
            let mut row = vec![0u64; words];
            for j in 0..m.cols() {
                if m[(i, j)].is_odd() {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();

    let mut rank = 0;
    for col in 0..m.cols() {
        let word = col / 64;
        let bit = 1u64 << (col % 64);
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (pivot_row, rest) = {
            let (head, tail) = rows.split_at_mut(rank + 1);
            (&head[rank], tail)
        };
        for row in rest.iter_mut() {
            if row[word] & bit != 0 {
                for (w, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *w ^= p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Integral change of basis `p^T m p`. Rejects non-unimodular `p`.
pub fn congruence_transform(m: &IntMatrix, p: &IntMatrix) -> Result<IntMatrix> {
    if !p.is_square() || p.rows() != m.rows() || !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "congruence of {}x{} by {}x{}",
            m.rows(),
            m.cols(),
            p.rows(),
            p.cols()
        )));
    }
    let det = p.det()?;
    if !det.abs().is_one() {
        return Err(Error::NotUnimodular { det });
    }
    p.transpose().mul(m)?.mul(p)
}
