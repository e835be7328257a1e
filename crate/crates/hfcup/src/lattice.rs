//! Integral lattices, discriminant-bilinear forms, and homologically split
//! surgery presentations.
//!
//! A lattice is `Z^n` with a symmetric Gram matrix `S`. Its dual quotient
//! `A_S = S^*/S` is a finite abelian group carrying the Q/Z-valued pairing
//! `b_S(t_1, t_2) = t_1 . t_2 mod 1`; two nondegenerate lattices are
//! stably equivalent (isomorphic after adding diagonal `<+-1>` summands)
//! exactly when these pairings are isomorphic.
//!
//! Not every lattice is stably diagonalizable, but every lattice becomes
//! diagonalizable after adding some diagonal stabilizer. [`diagonalize_stably`]
//! searches for such a stabilizer and a unimodular change of basis, verifying
//! any certificate before returning it; [`split_presentation`] packages the
//! result as a diagonal (homologically split) surgery presentation, with the
//! stabilizer entries recorded as lens-space connect summands.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::jsonnum::{self, JsonInt};
use crate::linalg::{congruence_transform, kernel_basis, snf_full, IntMatrix};
use crate::{Error, Result};

/// Default work budget for the searches in this module.
pub const DEFAULT_BUDGET: u64 = 10_000;

/// Free `Z`-module of finite rank with a symmetric bilinear form.
/// Degenerate forms are allowed; operations that need nondegeneracy split
/// off the zero summand first or reject.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(Lattice { gram })
    }

    /// Diagonal lattice `<d_1> + ... + <d_n>`.
    pub fn diagonal(entries: &[i64]) -> Self {
        let big: Vec<BigInt> = entries.iter().map(|&e| BigInt::from(e)).collect();
        Lattice {
            gram: IntMatrix::diagonal(&big),
        }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det().expect("gram is square")
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice {
            gram: self.gram.direct_sum(&other.gram),
        }
    }
}

/// Finite abelian group `A_S` with its Q/Z-valued symmetric pairing, given
/// on generators of the cyclic factors. Pairing values are canonical
/// representatives in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantForm {
    cyclic_orders: Vec<BigInt>,
    gram_qz: Vec<Vec<BigRational>>,
}

impl DiscriminantForm {
    pub fn trivial() -> Self {
        DiscriminantForm {
            cyclic_orders: Vec::new(),
            gram_qz: Vec::new(),
        }
    }

    /// Invariant factors of the group, each > 1, in divisibility order.
    pub fn cyclic_orders(&self) -> &[BigInt] {
        &self.cyclic_orders
    }

    pub fn pairing(&self) -> &[Vec<BigRational>] {
        &self.gram_qz
    }

    pub fn group_order(&self) -> BigInt {
        self.cyclic_orders.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.cyclic_orders.is_empty()
    }
}

impl Serialize for DiscriminantForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            cyclic_orders: Vec<JsonInt>,
            gram_qz: Vec<Vec<String>>,
        }
        Repr {
            cyclic_orders: jsonnum::wrap(&self.cyclic_orders),
            gram_qz: self
                .gram_qz
                .iter()
                .map(|row| row.iter().map(|r| r.to_string()).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscriminantForm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            cyclic_orders: Vec<JsonInt>,
            gram_qz: Vec<Vec<String>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let gram_qz: Vec<Vec<BigRational>> = repr
            .gram_qz
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        s.parse::<BigRational>()
                            .map_err(|_| D::Error::custom(format!("not a rational: {s:?}")))
                    })
                    .collect()
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(DiscriminantForm {
            cyclic_orders: jsonnum::unwrap(repr.cyclic_orders),
            gram_qz,
        })
    }
}

/// Outcome of a bounded decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    /// The work budget ran out before the search was exhaustive.
    Undecided,
}

fn mod1(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// Splits the radical: returns unimodular `w`, the corank `k`, and the
/// nondegenerate block `nd` with `w^T g w = 0_k (+) nd`.
fn zero_split(gram: &IntMatrix) -> (IntMatrix, usize, IntMatrix) {
    let n = gram.rows();
    let ker = kernel_basis(gram);
    let k = ker.cols();
    if k == 0 {
        return (IntMatrix::identity(n), 0, gram.clone());
    }
    // The kernel is saturated, so its basis matrix has unit invariant
    // factors and the first k columns of u_inv span it.
    let dec = snf_full(&ker);
    debug_assert!((0..k).all(|i| dec.d[(i, i)].is_one()));
    let w = dec.u_inv;
    let blocked = congruence_transform(gram, &w).expect("w unimodular");
    debug_assert!((0..k).all(|i| (0..n).all(|j| blocked[(i, j)].is_zero())));
    let nd = blocked.submatrix(k, n, k, n);
    (w, k, nd)
}

/// Solves `g x = rhs` over the rationals; `g` must be invertible.
fn solve_rational(g: &IntMatrix, rhs: &IntMatrix) -> Vec<Vec<BigRational>> {
    let n = g.rows();
    let cols = rhs.cols();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n + cols)
                .map(|j| {
                    let v = if j < n { g[(i, j)].clone() } else { rhs[(i, j - n)].clone() };
                    BigRational::from_integer(v)
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("nondegenerate gram");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for j in col..n + cols {
            a[col][j] = &a[col][j] * &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in col..n + cols {
                let sub = &factor * &a[col][j];
                a[r][j] = &a[r][j] - sub;
            }
        }
    }
    (0..n)
        .map(|i| a[i][n..].to_vec())
        .collect()
}

/// Discriminant group and Q/Z pairing of a lattice. The zero summand of a
/// degenerate form contributes nothing.
pub fn discriminant(l: &Lattice) -> DiscriminantForm {
    let (_, _, nd) = zero_split(&l.gram);
    let n = nd.rows();
    if n == 0 {
        return DiscriminantForm::trivial();
    }
    let dec = snf_full(&nd);
    // Cokernel generators: g_i = nd^{-1} u_inv e_i has order d_i in S*/S.
    let keep: Vec<usize> = (0..n).filter(|&i| !dec.d[(i, i)].is_one()).collect();
    if keep.is_empty() {
        return DiscriminantForm::trivial();
    }
    let duals = solve_rational(&nd, &dec.u_inv);
    let pair = |i: usize, j: usize| -> BigRational {
        // b(g_i, g_j) = (u_inv e_i)^T nd^{-1} (u_inv e_j)
        let mut acc = BigRational::zero();
        for r in 0..n {
            let lhs = BigRational::from_integer(dec.u_inv[(r, i)].clone());
            acc += lhs * &duals[r][j];
        }
        mod1(&acc)
    };
    let gram_qz: Vec<Vec<BigRational>> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| pair(i, j)).collect())
        .collect();
    DiscriminantForm {
        cyclic_orders: keep.iter().map(|&i| dec.d[(i, i)].clone()).collect(),
        gram_qz,
    }
}

/// Group element in coordinates modulo the cyclic orders.
type GroupElement = Vec<u64>;

fn all_elements(orders: &[u64]) -> Vec<GroupElement> {
    let mut out = vec![vec![0; orders.len()]];
    for (i, &d) in orders.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * d as usize);
        for e in &out {
            for v in 0..d {
                let mut e2 = e.clone();
                e2[i] = v;
                next.push(e2);
            }
        }
        out = next;
    }
    out
}

fn element_order(orders: &[u64], e: &GroupElement) -> u64 {
    orders
        .iter()
        .zip(e)
        .map(|(&d, &x)| d / d.gcd(&x))
        .fold(1u64, |acc, o| acc.lcm(&o))
}

fn pair_elements(gram: &[Vec<BigRational>], x: &GroupElement, y: &GroupElement) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            if yj == 0 {
                continue;
            }
            let scale = BigInt::from(xi) * BigInt::from(yj);
            acc += BigRational::from_integer(scale) * &gram[i][j];
        }
    }
    mod1(&acc)
}

fn add_elements(orders: &[u64], x: &GroupElement, y: &GroupElement) -> GroupElement {
    orders
        .iter()
        .zip(x.iter().zip(y))
        .map(|(&d, (&a, &b))| (a + b) % d)
        .collect()
}

fn generates_group(orders: &[u64], gens: &[GroupElement], order: u64) -> bool {
    use std::collections::HashSet;
    let mut seen: HashSet<GroupElement> = HashSet::new();
    seen.insert(vec![0; orders.len()]);
    let mut frontier: Vec<GroupElement> = vec![vec![0; orders.len()]];
    while let Some(e) = frontier.pop() {
        for g in gens {
            let next = add_elements(orders, &e, g);
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen.len() as u64 == order
}

/// Decides whether two discriminant forms are isomorphic: same invariant
/// factors and a generator assignment preserving the pairing.
///
/// `budget` bounds both the group order and the number of candidate
/// assignments examined; past it the answer is [`Verdict::Undecided`].
/// A [`Verdict::No`] is exhaustive: either the groups differ or every
/// assignment was ruled out.
pub fn disc_isomorphic(a: &DiscriminantForm, c: &DiscriminantForm, budget: u64) -> Verdict {
    if a.cyclic_orders != c.cyclic_orders {
        return Verdict::No;
    }
    if a.is_trivial() {
        return Verdict::Yes;
    }
    let order = match a.group_order().to_u64() {
        Some(o) if o <= budget => o,
        _ => return Verdict::Undecided,
    };
    let orders: Vec<u64> = a
        .cyclic_orders
        .iter()
        .map(|d| d.to_u64().expect("order bounded by budget"))
        .collect();
    let rank = orders.len();
    let elements = all_elements(&orders);
    // Candidate images for the i-th generator: elements of exact order d_i.
    let candidates: Vec<Vec<&GroupElement>> = (0..rank)
        .map(|i| {
            elements
                .iter()
                .filter(|e| element_order(&orders, e) == orders[i])
                .collect()
        })
        .collect();

    struct Dfs<'a> {
        orders: &'a [u64],
        source: &'a [Vec<BigRational>],
        target: &'a [Vec<BigRational>],
        candidates: &'a [Vec<&'a GroupElement>],
        order: u64,
        work: u64,
        budget: u64,
    }
    enum Outcome {
        Found,
        Exhausted,
        OutOfBudget,
    }
    impl Dfs<'_> {
        fn run(&mut self, chosen: &mut Vec<GroupElement>) -> Outcome {
            let depth = chosen.len();
            if depth == self.candidates.len() {
                return if generates_group(self.orders, chosen, self.order) {
                    Outcome::Found
                } else {
                    Outcome::Exhausted
                };
            }
            for &cand in self.candidates[depth].iter() {
                self.work += 1;
                if self.work > self.budget {
                    return Outcome::OutOfBudget;
                }
                // Pairings with generators already placed, and with itself,
                // must match the source form on the standard generators.
                let mut source_gen = vec![0u64; self.orders.len()];
                source_gen[depth] = 1;
                let ok = (0..=depth).all(|j| {
                    let mut other_gen = vec![0u64; self.orders.len()];
                    other_gen[j] = 1;
                    let want = pair_elements(self.source, &source_gen, &other_gen);
                    let other = if j == depth { cand } else { &chosen[j] };
                    pair_elements(self.target, cand, other) == want
                });
                if !ok {
                    continue;
                }
                chosen.push(cand.clone());
                match self.run(chosen) {
                    Outcome::Found => return Outcome::Found,
                    Outcome::OutOfBudget => return Outcome::OutOfBudget,
                    Outcome::Exhausted => {
                        chosen.pop();
                    }
                }
            }
            Outcome::Exhausted
        }
    }

    let mut dfs = Dfs {
        orders: &orders,
        source: &a.gram_qz,
        target: &c.gram_qz,
        candidates: &candidates,
        order,
        work: 0,
        budget,
    };
    match dfs.run(&mut Vec::new()) {
        Outcome::Found => Verdict::Yes,
        Outcome::Exhausted => Verdict::No,
        Outcome::OutOfBudget => Verdict::Undecided,
    }
}

/// Stable equivalence of nondegenerate lattices: by the discriminant-form
/// criterion this is exactly [`disc_isomorphic`] of the two discriminants.
pub fn stably_equivalent(a: &Lattice, c: &Lattice, budget: u64) -> Result<Verdict> {
    if a.det().is_zero() || c.det().is_zero() {
        return Err(Error::DegenerateLattice);
    }
    Ok(disc_isomorphic(&discriminant(a), &discriminant(c), budget))
}

/// A verified stable diagonalization: `change_of_basis` is unimodular and
/// conjugates `gram (+) diag(stabilizer)` to `diag(diagonal)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub stabilizer: Vec<BigInt>,
    pub change_of_basis: IntMatrix,
    pub diagonal: Vec<BigInt>,
}

impl Serialize for Diagonalization {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            stabilizer: Vec<JsonInt>,
            change_of_basis: &'a IntMatrix,
            diagonal: Vec<JsonInt>,
        }
        Repr {
            stabilizer: jsonnum::wrap(&self.stabilizer),
            change_of_basis: &self.change_of_basis,
            diagonal: jsonnum::wrap(&self.diagonal),
        }
        .serialize(serializer)
    }
}

fn small_divisors(n: &BigInt) -> Vec<u64> {
    let Some(v) = n.abs().to_u64() else {
        return vec![1];
    };
    if v == 0 {
        return vec![1];
    }
    let mut ds = Vec::new();
    let mut i = 1u64;
    while i.saturating_mul(i) <= v {
        if v % i == 0 {
            ds.push(i);
            if i != v / i {
                ds.push(v / i);
            }
        }
        i += 1;
    }
    ds.sort_unstable();
    ds
}

/// Stabilizer candidates: signed divisors of the determinant first, then
/// the remaining small integers, positives before negatives.
fn stabilizer_pool(det: &BigInt, len: usize) -> Vec<i64> {
    let divisors = small_divisors(det);
    let mut pool: Vec<i64> = Vec::new();
    for &d in &divisors {
        if let Ok(d) = i64::try_from(d) {
            pool.push(d);
            pool.push(-d);
        }
    }
    let mut k = 1i64;
    while pool.len() < len {
        if !divisors.contains(&(k as u64)) {
            pool.push(k);
            pool.push(-k);
        }
        k += 1;
    }
    pool.truncate(len);
    pool
}

struct SplitSearch {
    budget: u64,
    nodes: u64,
}

impl SplitSearch {
    fn exhausted(&self) -> bool {
        self.nodes > self.budget
    }

    /// Candidate splitting vectors: primitive, canonical sign, nonzero
    /// length dividing all its pairings, ordered by (|length|, lex).
    fn candidates(g: &IntMatrix, bound: i64) -> Vec<(BigInt, Vec<BigInt>)> {
        let n = g.rows();
        let mut out = Vec::new();
        let width = (2 * bound + 1) as u64;
        let total = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(width));
        let Some(total) = total else {
            return out;
        };
        'outer: for code in 0..total {
            let mut c = code;
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push((c % width) as i64 - bound);
                c /= width;
            }
            let first_nonzero = v.iter().find(|&&x| x != 0);
            match first_nonzero {
                None => continue,
                Some(&x) if x < 0 => continue, // canonical sign
                _ => {}
            }
            let mut gcd = 0u64;
            for &x in &v {
                gcd = gcd.gcd(&x.unsigned_abs());
            }
            if gcd != 1 {
                continue;
            }
            let vb: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
            let mut gv = vec![BigInt::zero(); n];
            for i in 0..n {
                for j in 0..n {
                    gv[i] += &g[(i, j)] * &vb[j];
                }
            }
            let q: BigInt = (0..n).map(|i| &vb[i] * &gv[i]).sum();
            if q.is_zero() {
                continue;
            }
            for e in &gv {
                if !(e % &q).is_zero() {
                    continue 'outer;
                }
            }
            out.push((q, vb));
        }
        out.sort_by(|(qa, va), (qb, vb)| qa.abs().cmp(&qb.abs()).then(va.cmp(vb)));
        out
    }

    /// Looks for unimodular `p` with `p^T g p` diagonal by recursively
    /// splitting off orthogonal rank-1 summands.
    fn try_diagonalize(&mut self, g: &IntMatrix, bound: i64) -> Option<IntMatrix> {
        self.nodes += 1;
        if self.exhausted() {
            return None;
        }
        let n = g.rows();
        if g.is_diagonal() {
            return Some(IntMatrix::identity(n));
        }
        for (q, v) in Self::candidates(g, bound) {
            // Integral projection away from v: pi(w) = w - (b(v,w)/q) v.
            let mut gv = vec![BigInt::zero(); n];
            for i in 0..n {
                for j in 0..n {
                    gv[i] += &g[(i, j)] * &v[j];
                }
            }
            let mut image = IntMatrix::zero(n, n);
            for col in 0..n {
                let ratio = &gv[col] / &q;
                for row in 0..n {
                    let mut val = -(&ratio * &v[row]);
                    if row == col {
                        val += BigInt::one();
                    }
                    image[(row, col)] = val;
                }
            }
            // Basis of the image lattice (the orthogonal complement of v).
            let dec = snf_full(&image);
            debug_assert_eq!(dec.rank, n - 1);
            let complement = image
                .mul(&dec.v)
                .expect("square")
                .submatrix(0, n, 0, dec.rank);
            let sub_gram = complement
                .transpose()
                .mul(g)
                .expect("dims")
                .mul(&complement)
                .expect("dims");
            if let Some(p_sub) = self.try_diagonalize(&sub_gram, bound) {
                let rest = complement.mul(&p_sub).expect("dims");
                let mut p = IntMatrix::zero(n, n);
                for row in 0..n {
                    p[(row, 0)] = v[row].clone();
                    for col in 1..n {
                        p[(row, col)] = rest[(row, col - 1)].clone();
                    }
                }
                return Some(p);
            }
            if self.exhausted() {
                return None;
            }
        }
        None
    }
}

fn combinations_with_replacement(pool: &[i64], size: usize) -> Vec<Vec<i64>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    fn rec(pool: &[i64], size: usize, start: usize, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..pool.len() {
            current.push(pool[i]);
            rec(pool, size, i, current, out);
            current.pop();
        }
    }
    rec(pool, size, 0, &mut Vec::new(), &mut out);
    out
}

/// Searches for a diagonal stabilizer `L` and unimodular `P` such that
/// `P^T (gram (+) L) P` is diagonal. Iteratively deepens over the vector
/// entry bound, the stabilizer size and the stabilizer pool; `None` means
/// the node budget ran out, not that no stabilizer exists.
///
/// Every returned certificate is re-verified by an exact congruence check.
pub fn diagonalize_stably(l: &Lattice, budget: u64) -> Option<Diagonalization> {
    let gram = &l.gram;
    let (w, corank, nd) = zero_split(gram);
    let det = if nd.rows() > 0 {
        nd.det().expect("square")
    } else {
        BigInt::one()
    };
    let mut search = SplitSearch { budget, nodes: 0 };
    let mut level = 0usize;
    loop {
        level += 1;
        let bound = level as i64;
        let pool = stabilizer_pool(&det, 2 * (level - 1));
        for size in 0..level {
            for combo in combinations_with_replacement(&pool, size) {
                let stab: Vec<BigInt> = combo.iter().map(|&e| BigInt::from(e)).collect();
                let candidate = nd.direct_sum(&IntMatrix::diagonal(&stab));
                if let Some(p_sub) = search.try_diagonalize(&candidate, bound) {
                    let full = gram.direct_sum(&IntMatrix::diagonal(&stab));
                    let p_full = w
                        .direct_sum(&IntMatrix::identity(size))
                        .mul(&IntMatrix::identity(corank).direct_sum(&p_sub))
                        .expect("dims");
                    let check =
                        congruence_transform(&full, &p_full).expect("certificate is unimodular");
                    assert!(check.is_diagonal(), "certificate failed verification");
                    return Some(Diagonalization {
                        stabilizer: stab,
                        change_of_basis: p_full,
                        diagonal: check.diagonal_entries(),
                    });
                }
                if search.exhausted() {
                    return None;
                }
            }
        }
    }
}

/// Diagonal surgery presentation extracted from a linking matrix: `b1` zero
/// framings for the radical, the nonzero diagonal entries as framings, and
/// the stabilizer recorded as `L(m, 1)` connect summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPresentation {
    /// Nonzero framings of the homologically split presentation.
    pub framings: Vec<BigInt>,
    /// Lens-space cost: one `L(m, 1)` summand per stabilizer entry.
    pub lens_spaces: Vec<BigInt>,
    /// Number of 0-framed components, the first Betti number.
    pub b1: usize,
}

impl Serialize for SplitPresentation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            framings: Vec<JsonInt>,
            lens_spaces: Vec<JsonInt>,
            b1: usize,
        }
        Repr {
            framings: jsonnum::wrap(&self.framings),
            lens_spaces: jsonnum::wrap(&self.lens_spaces),
            b1: self.b1,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SplitPresentation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            framings: Vec<JsonInt>,
            lens_spaces: Vec<JsonInt>,
            b1: usize,
        }
        let repr = Repr::deserialize(deserializer)?;
        Ok(SplitPresentation {
            framings: jsonnum::unwrap(repr.framings),
            lens_spaces: jsonnum::unwrap(repr.lens_spaces),
            b1: repr.b1,
        })
    }
}

/// Splits a linking matrix into a homologically split presentation:
/// zero summand separated, nondegenerate part stably diagonalized.
/// `None` means the diagonalization budget ran out.
pub fn split_presentation(linking: &IntMatrix, budget: u64) -> Result<Option<SplitPresentation>> {
    let l = Lattice::new(linking.clone())?;
    let Some(diag) = diagonalize_stably(&l, budget) else {
        return Ok(None);
    };
    let framings: Vec<BigInt> = diag
        .diagonal
        .iter()
        .filter(|d| !d.is_zero())
        .cloned()
        .collect();
    let b1 = diag.diagonal.len() - framings.len();
    Ok(Some(SplitPresentation {
        framings,
        lens_spaces: diag.stabilizer,
        b1,
    }))
}

/// First Betti number of the torsion-free model: 0-surgery on the 0-framed
/// sublink gives `H_1 = Z^b1`, and the nonzero framings only add torsion
/// that neither the cup form nor the predicted Floer rank sees.
pub fn reduce_torsion(p: &SplitPresentation) -> usize {
    p.b1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn hyperbolic_two() -> Lattice {
        Lattice::new(IntMatrix::from_rows(&[vec![0, 2], vec![2, 0]])).unwrap()
    }

    #[test]
    fn discriminant_unimodular_is_trivial() {
        let d = discriminant(&Lattice::diagonal(&[1]));
        assert!(d.is_trivial());
        let d = discriminant(&Lattice::diagonal(&[1, -1, 1]));
        assert!(d.is_trivial());
    }

    #[test]
    fn discriminant_rank_one() {
        let d = discriminant(&Lattice::diagonal(&[5]));
        assert_eq!(d.cyclic_orders(), &[BigInt::from(5)]);
        assert_eq!(d.pairing()[0][0], rational(1, 5));

        let d = discriminant(&Lattice::diagonal(&[-5]));
        assert_eq!(d.cyclic_orders(), &[BigInt::from(5)]);
        // 1/(-5) mod 1 = 4/5.
        assert_eq!(d.pairing()[0][0], rational(4, 5));
    }

    #[test]
    fn discriminant_hyperbolic() {
        let d = discriminant(&hyperbolic_two());
        assert_eq!(d.cyclic_orders(), &[BigInt::from(2), BigInt::from(2)]);
        assert_eq!(d.pairing()[0][0], rational(0, 1));
        assert_eq!(d.pairing()[1][1], rational(0, 1));
        assert_eq!(d.pairing()[0][1], rational(1, 2));
        assert_eq!(d.pairing()[1][0], rational(1, 2));
    }

    /// Enumerates all of S*/S directly and pairs coset representatives;
    /// independent of the SNF-generator route.
    fn pairing_multiset_oracle(l: &Lattice) -> Vec<BigRational> {
        let g = l.gram();
        let n = g.rows();
        let dual = solve_rational(g, &IntMatrix::identity(n));
        // Cosets of Z^n inside S* = g^{-1} Z^n: enumerate integer
        // combinations of the dual basis modulo 1.
        let det = l.det().abs().to_u64().unwrap() as i64;
        let mut reps: Vec<Vec<BigRational>> = Vec::new();
        let mut stack = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for prefix in &stack {
                for c in 0..det {
                    let mut p = prefix.clone();
                    p.push(c);
                    next.push(p);
                }
            }
            stack = next;
        }
        'combo: for combo in &stack {
            let vec: Vec<BigRational> = (0..n)
                .map(|r| {
                    let mut acc = BigRational::zero();
                    for (c, &coef) in combo.iter().enumerate() {
                        acc += BigRational::from_integer(BigInt::from(coef)) * &dual[r][c];
                    }
                    mod1(&acc)
                })
                .collect();
            for seen in &reps {
                if seen == &vec {
                    continue 'combo;
                }
            }
            reps.push(vec);
        }
        assert_eq!(reps.len() as i64, det, "|A_S| = |det|");
        let mut pairings: Vec<BigRational> = reps
            .iter()
            .map(|t| {
                // b(t, t) = t^T g t mod 1
                let mut acc = BigRational::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc += &t[i] * BigRational::from_integer(g[(i, j)].clone()) * &t[j];
                    }
                }
                mod1(&acc)
            })
            .collect();
        pairings.sort();
        pairings
    }

    /// Same multiset of self-pairings, derived from the DiscriminantForm.
    fn pairing_multiset_from_disc(d: &DiscriminantForm) -> Vec<BigRational> {
        let orders: Vec<u64> = d.cyclic_orders.iter().map(|o| o.to_u64().unwrap()).collect();
        let mut out: Vec<BigRational> = all_elements(&orders)
            .iter()
            .map(|e| pair_elements(&d.gram_qz, e, e))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn discriminant_matches_coset_enumeration() {
        for l in [
            hyperbolic_two(),
            Lattice::diagonal(&[2, 3]),
            Lattice::diagonal(&[4]),
            Lattice::new(IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]])).unwrap(),
            Lattice::new(IntMatrix::from_rows(&[vec![0, 3], vec![3, 0]])).unwrap(),
        ] {
            assert_eq!(
                pairing_multiset_from_disc(&discriminant(&l)),
                pairing_multiset_oracle(&l),
                "lattice {:?}",
                l.gram()
            );
        }
    }

    #[test]
    fn group_order_equals_det() {
        let mut state = 0xabcdef0123456789u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut tried = 0;
        while tried < 20 {
            let n = (next() % 3 + 1) as usize;
            let mut g = IntMatrix::zero(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = BigInt::from((next() % 9) as i64 - 4);
                    g[(i, j)] = v.clone();
                    g[(j, i)] = v;
                }
            }
            let det = g.det().unwrap();
            if det.is_zero() {
                continue;
            }
            tried += 1;
            let l = Lattice::new(g).unwrap();
            assert_eq!(discriminant(&l).group_order(), det.abs());
        }
    }

    #[test]
    fn disc_isomorphic_examples() {
        let trivial = DiscriminantForm::trivial();
        assert_eq!(disc_isomorphic(&trivial, &trivial, DEFAULT_BUDGET), Verdict::Yes);

        let h2 = discriminant(&hyperbolic_two());
        let two_two = discriminant(&Lattice::diagonal(&[2, 2]));
        assert_eq!(disc_isomorphic(&h2, &two_two, DEFAULT_BUDGET), Verdict::No);

        let h2_plus = discriminant(&hyperbolic_two().direct_sum(&Lattice::diagonal(&[2])));
        let diag = discriminant(&Lattice::diagonal(&[2, 2, -2]));
        assert_eq!(disc_isomorphic(&h2_plus, &diag, DEFAULT_BUDGET), Verdict::Yes);
    }

    #[test]
    fn disc_isomorphic_is_reflexive_and_symmetric() {
        let forms = [
            discriminant(&Lattice::diagonal(&[3, 5])),
            discriminant(&hyperbolic_two()),
            discriminant(&Lattice::diagonal(&[2, -4])),
        ];
        for f in &forms {
            assert_eq!(disc_isomorphic(f, f, DEFAULT_BUDGET), Verdict::Yes);
        }
        for a in &forms {
            for b in &forms {
                assert_eq!(
                    disc_isomorphic(a, b, DEFAULT_BUDGET),
                    disc_isomorphic(b, a, DEFAULT_BUDGET)
                );
            }
        }
    }

    #[test]
    fn disc_isomorphic_budget() {
        let big = discriminant(&Lattice::diagonal(&[10007]));
        assert_eq!(disc_isomorphic(&big, &big, DEFAULT_BUDGET), Verdict::Undecided);
        assert_eq!(disc_isomorphic(&big, &big, 20000), Verdict::Yes);
    }

    #[test]
    fn stably_equivalent_examples() {
        // All unimodular diagonal lattices are stably equivalent.
        let a = Lattice::diagonal(&[1, 1, -1]);
        let b = Lattice::diagonal(&[1, -1, -1, -1, 1]);
        assert_eq!(stably_equivalent(&a, &b, DEFAULT_BUDGET).unwrap(), Verdict::Yes);

        // The hyperbolic form is not stably diagonalizable.
        for diag in [
            Lattice::diagonal(&[2, 2]),
            Lattice::diagonal(&[2, -2]),
            Lattice::diagonal(&[-2, -2]),
            Lattice::diagonal(&[1, 4]),
            Lattice::diagonal(&[1, -4]),
            Lattice::diagonal(&[4, -1]),
        ] {
            assert_eq!(
                stably_equivalent(&hyperbolic_two(), &diag, DEFAULT_BUDGET).unwrap(),
                Verdict::No,
                "H2 vs {:?}",
                diag.gram()
            );
        }

        // <2> and <-2> pair to 1/2 = -1/2 in Q/Z, so they are stably
        // equivalent; explicitly, <2> + <-1> and <1> + <-2> are isomorphic.
        assert_eq!(
            stably_equivalent(&Lattice::diagonal(&[2]), &Lattice::diagonal(&[-2]), DEFAULT_BUDGET)
                .unwrap(),
            Verdict::Yes
        );
        let lhs = Lattice::diagonal(&[2, -1]);
        let p = IntMatrix::from_rows(&[vec![1, 1], vec![1, 2]]);
        let rhs = congruence_transform(lhs.gram(), &p).unwrap();
        assert_eq!(rhs, IntMatrix::from_rows(&[vec![1, 0], vec![0, -2]]));

        assert!(matches!(
            stably_equivalent(
                &Lattice::diagonal(&[0, 2]),
                &Lattice::diagonal(&[2]),
                DEFAULT_BUDGET
            ),
            Err(Error::DegenerateLattice)
        ));
    }

    #[test]
    fn stably_equivalent_congruence_invariant() {
        let s = Lattice::new(IntMatrix::from_rows(&[vec![2, 1, 0], vec![1, -3, 2], vec![0, 2, 4]]))
            .unwrap();
        let p = IntMatrix::from_rows(&[vec![1, 0, 1], vec![2, 1, 0], vec![0, 0, 1]]);
        let t = Lattice::new(congruence_transform(s.gram(), &p).unwrap()).unwrap();
        assert_eq!(stably_equivalent(&s, &t, DEFAULT_BUDGET).unwrap(), Verdict::Yes);
    }

    #[test]
    fn diagonalize_already_diagonal() {
        let l = Lattice::diagonal(&[3, -5]);
        let d = diagonalize_stably(&l, DEFAULT_BUDGET).unwrap();
        assert!(d.stabilizer.is_empty());
        assert!(d.change_of_basis.is_identity());
        assert_eq!(d.diagonal, vec![BigInt::from(3), BigInt::from(-5)]);
    }

    #[test]
    fn diagonalize_hyperbolic_needs_a_two() {
        let d = diagonalize_stably(&hyperbolic_two(), DEFAULT_BUDGET).unwrap();
        assert_eq!(d.stabilizer, vec![BigInt::from(2)]);
        let mut sorted = d.diagonal.clone();
        sorted.sort();
        assert_eq!(sorted, vec![BigInt::from(-2), BigInt::from(2), BigInt::from(2)]);
        // Certificate checks out.
        let full = hyperbolic_two()
            .gram()
            .direct_sum(&IntMatrix::diagonal(&[BigInt::from(2)]));
        let conj = congruence_transform(&full, &d.change_of_basis).unwrap();
        assert_eq!(conj, IntMatrix::diagonal(&d.diagonal));
    }

    #[test]
    fn diagonalize_unimodular_hyperbolic() {
        let h1 = Lattice::new(IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap();
        let d = diagonalize_stably(&h1, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.stabilizer, vec![BigInt::from(1)]);
        let mut sorted = d.diagonal.clone();
        sorted.sort();
        assert_eq!(sorted, vec![BigInt::from(-1), BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn diagonalize_degenerate() {
        let g = IntMatrix::from_rows(&[vec![0, 0, 0], vec![0, 0, 2], vec![0, 2, 0]]);
        let l = Lattice::new(g.clone()).unwrap();
        let d = diagonalize_stably(&l, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.diagonal[0], BigInt::zero());
        let full = g.direct_sum(&IntMatrix::diagonal(&d.stabilizer));
        let conj = congruence_transform(&full, &d.change_of_basis).unwrap();
        assert!(conj.is_diagonal());
    }

    #[test]
    fn split_presentation_examples() {
        let zero3 = IntMatrix::zero(3, 3);
        let p = split_presentation(&zero3, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(p.b1, 3);
        assert!(p.framings.is_empty());
        assert!(p.lens_spaces.is_empty());
        assert_eq!(reduce_torsion(&p), 3);

        let h2 = IntMatrix::from_rows(&[vec![0, 2], vec![2, 0]]);
        let p = split_presentation(&h2, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(p.b1, 0);
        assert_eq!(p.lens_spaces, vec![BigInt::from(2)]);
        let mut sorted = p.framings.clone();
        sorted.sort();
        assert_eq!(sorted, vec![BigInt::from(-2), BigInt::from(2), BigInt::from(2)]);

        let diag = IntMatrix::from_rows(&[vec![7, 0], vec![0, -9]]);
        let p = split_presentation(&diag, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(p.framings, vec![BigInt::from(7), BigInt::from(-9)]);
        assert!(p.lens_spaces.is_empty());
        assert_eq!(p.b1, 0);
    }

    #[test]
    fn split_presentation_mixed_zeroes() {
        let g = IntMatrix::from_rows(&[
            vec![0, 0, 0, 0],
            vec![0, 5, 0, 0],
            vec![0, 0, 0, 0],
            vec![0, 0, 0, 0],
        ]);
        let p = split_presentation(&g, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(p.b1, 3);
        assert_eq!(p.framings, vec![BigInt::from(5)]);
        assert_eq!(reduce_torsion(&p), 3);
    }

    #[test]
    fn split_presentation_disc_consistency() {
        // The diagonal presentation must have the discriminant of
        // input (+) lens spaces.
        let inputs = [
            IntMatrix::from_rows(&[vec![0, 2], vec![2, 0]]),
            IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]]),
            IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]),
            IntMatrix::from_rows(&[vec![4]]),
        ];
        for g in &inputs {
            let p = split_presentation(g, DEFAULT_BUDGET).unwrap().unwrap();
            let framings: Vec<BigInt> = p.framings.clone();
            let diag = Lattice::new(IntMatrix::diagonal(&framings)).unwrap();
            let stabbed = Lattice::new(
                g.direct_sum(&IntMatrix::diagonal(&p.lens_spaces)),
            )
            .unwrap();
            assert_eq!(
                disc_isomorphic(&discriminant(&diag), &discriminant(&stabbed), DEFAULT_BUDGET),
                Verdict::Yes,
                "presentation of {g:?}"
            );
        }
    }

    #[test]
    fn split_presentation_rejects_asymmetric() {
        let g = IntMatrix::from_rows(&[vec![0, 1], vec![2, 0]]);
        assert!(matches!(
            split_presentation(&g, DEFAULT_BUDGET),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn reduce_torsion_examples() {
        let rational_sphere = SplitPresentation {
            framings: vec![BigInt::from(2), BigInt::from(2), BigInt::from(-2)],
            lens_spaces: vec![BigInt::from(2)],
            b1: 0,
        };
        assert_eq!(reduce_torsion(&rational_sphere), 0);
        let with_betti = SplitPresentation {
            framings: vec![BigInt::from(5)],
            lens_spaces: vec![],
            b1: 3,
        };
        assert_eq!(reduce_torsion(&with_betti), 3);
    }

    #[test]
    fn discriminant_invariant_under_congruence() {
        let mut state = 0x0f0f0f0f12345678u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let shears = [
            IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]),
            IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, -2], vec![0, 0, 1]]),
            IntMatrix::from_rows(&[vec![1, 0, 0], vec![3, 1, 0], vec![1, 0, 1]]),
        ];
        let mut tried = 0;
        while tried < 10 {
            let mut g = IntMatrix::zero(3, 3);
            for i in 0..3 {
                for j in i..3 {
                    let v = BigInt::from((next() % 11) as i64 - 5);
                    g[(i, j)] = v.clone();
                    g[(j, i)] = v;
                }
            }
            if g.det().unwrap().is_zero() {
                continue;
            }
            tried += 1;
            let p = &shears[(next() % 3) as usize];
            let t = congruence_transform(&g, p).unwrap();
            let a = discriminant(&Lattice::new(g).unwrap());
            let b = discriminant(&Lattice::new(t).unwrap());
            assert_eq!(a.cyclic_orders, b.cyclic_orders);
            assert_eq!(disc_isomorphic(&a, &b, DEFAULT_BUDGET), Verdict::Yes);
        }
    }

    #[test]
    fn json_roundtrip() {
        let d = discriminant(&hyperbolic_two());
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("1/2"));
        let back: DiscriminantForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);

        let p = SplitPresentation {
            framings: vec![BigInt::from(2), BigInt::from(-2)],
            lens_spaces: vec![BigInt::from(2)],
            b1: 1,
        };
        let s = serde_json::to_string(&p).unwrap();
        let back: SplitPresentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
