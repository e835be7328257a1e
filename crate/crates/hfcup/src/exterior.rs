//! The exterior algebra on `Z^b`: wedge monomials as bitmasks, signed wedge
//! products, and the shuffle signs used when contracting against a 3-form.
//!
//! Basis index `i` (1-based, `i <= 64`) occupies bit `i - 1`. Monomial
//! enumeration is in increasing bitmask order, which makes degree,
//! disjointness and basis position O(1) to extract.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::jsonnum::JsonInt;
use crate::{Error, Result};

/// Maximum ambient rank supported by the bitmask representation.
pub const MAX_RANK: usize = 64;

/// A wedge monomial: a set of basis indices, canonically a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(u64);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(0)
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    /// Builds a monomial from strictly increasing 1-based indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        let mut prev = 0usize;
        for &i in indices {
            if i == 0 || i > MAX_RANK {
                return Err(Error::InvalidMultiIndex(format!(
                    "index {i} outside 1..={MAX_RANK}"
                )));
            }
            if i <= prev {
                return Err(Error::InvalidMultiIndex(format!(
                    "indices must be strictly increasing, got {i} after {prev}"
                )));
            }
            mask |= 1 << (i - 1);
            prev = i;
        }
        Ok(MultiIndex(mask))
    }

    /// The 1-based indices, ascending.
    pub fn indices(&self) -> Vec<usize> {
        (0..MAX_RANK).filter(|&i| self.0 & (1 << i) != 0).map(|i| i + 1).collect()
    }

    pub fn degree(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn max_index(&self) -> usize {
        (64 - self.0.leading_zeros()) as usize
    }

    pub fn is_subset_of(&self, other: &MultiIndex) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint_from(&self, other: &MultiIndex) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0 | other.0)
    }

    pub fn difference(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0 & !other.0)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{:?}", self.indices())
    }
}

/// Sign of merging two disjoint ascending index sets into one ascending
/// sequence: `(-1)^inv` where `inv` counts pairs `(i in a, j in b)` with
/// `j < i`.
pub fn merge_sign(a: MultiIndex, b: MultiIndex) -> i8 {
    debug_assert!(a.is_disjoint_from(&b));
    let mut inversions = 0u32;
    let mut bits = a.0;
    while bits != 0 {
        let low = bits.trailing_zeros();
        inversions += (b.0 & ((1u64 << low) - 1)).count_ones();
        bits &= bits - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the shuffle moving a 3-element subset `t` of `s` to the front:
/// the parity of the permutation taking `s` ascending to
/// `(t ascending, s \ t ascending)`.
pub fn monomial_shuffle_sign(t: MultiIndex, s: MultiIndex) -> Result<i8> {
    if t.degree() != 3 {
        return Err(Error::InvalidShuffle(format!(
            "subset must have exactly 3 indices, got {}",
            t.degree()
        )));
    }
    if !t.is_subset_of(&s) {
        return Err(Error::InvalidShuffle(format!("{t:?} is not a subset of {s:?}")));
    }
    Ok(merge_sign(t, s.difference(&t)))
}

/// All degree-`degree` monomials on indices `1..=b`, in increasing bitmask
/// order. Empty when `degree > b`.
pub fn basis(b: usize, degree: usize) -> Vec<MultiIndex> {
    assert!(b <= MAX_RANK, "rank {b} exceeds {MAX_RANK}");
    if degree > b {
        return Vec::new();
    }
    if degree == 0 {
        return vec![MultiIndex::empty()];
    }
    let limit = if b == 64 { u64::MAX } else { (1u64 << b) - 1 };
    let mut out = Vec::new();
    let mut mask = (1u64 << degree) - 1;
    while mask <= limit {
        out.push(MultiIndex(mask));
        // Gosper's hack: next larger mask with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        let next = (((r ^ mask) >> 2) / c) | r;
        if next <= mask {
            break;
        }
        mask = next;
    }
    out
}

/// An element of the exterior algebra on `Z^b`: a finite integer
/// combination of wedge monomials. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct ExteriorElement {
    b: usize,
    terms: BTreeMap<MultiIndex, BigInt>,
}

impl ExteriorElement {
    pub fn zero(b: usize) -> Self {
        assert!(b <= MAX_RANK);
        ExteriorElement {
            b,
            terms: BTreeMap::new(),
        }
    }

    /// The scalar `c` in degree 0.
    pub fn scalar(b: usize, c: BigInt) -> Self {
        let mut e = ExteriorElement::zero(b);
        e.add_term(MultiIndex::empty(), c);
        e
    }

    pub fn monomial(b: usize, index: MultiIndex, coeff: BigInt) -> Result<Self> {
        if index.max_index() > b {
            return Err(Error::InvalidMultiIndex(format!(
                "{index:?} exceeds ambient rank {b}"
            )));
        }
        let mut e = ExteriorElement::zero(b);
        e.add_term(index, coeff);
        Ok(e)
    }

    /// The basis vector `e_i`.
    pub fn generator(b: usize, i: usize) -> Result<Self> {
        ExteriorElement::monomial(b, MultiIndex::from_indices(&[i])?, BigInt::one())
    }

    pub fn ambient_rank(&self) -> usize {
        self.b
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> BigInt {
        self.terms.get(index).cloned().unwrap_or_else(BigInt::zero)
    }

    /// True when every term has the given degree (vacuously for zero).
    pub fn is_homogeneous_of_degree(&self, degree: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    pub(crate) fn add_term(&mut self, index: MultiIndex, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(index) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.b != other.b {
            return Err(Error::AmbientRankMismatch {
                left: self.b,
                right: other.b,
            });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        ExteriorElement {
            b: self.b,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return ExteriorElement::zero(self.b);
        }
        ExteriorElement {
            b: self.b,
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }
}

/// Signed graded-commutative product. Monomials sharing an index annihilate.
pub fn wedge(a: &ExteriorElement, c: &ExteriorElement) -> Result<ExteriorElement> {
    if a.b != c.b {
        return Err(Error::AmbientRankMismatch {
            left: a.b,
            right: c.b,
        });
    }
    let mut out = ExteriorElement::zero(a.b);
    for (ma, ca) in &a.terms {
        for (mc, cc) in &c.terms {
            if !ma.is_disjoint_from(mc) {
                continue;
            }
            let sign = merge_sign(*ma, *mc);
            let coeff = if sign > 0 { ca * cc } else { -(ca * cc) };
            out.add_term(ma.union(mc), coeff);
        }
    }
    Ok(out)
}

impl fmt::Debug for ExteriorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{c}*{m:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for ExteriorElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            indices: Vec<usize>,
            coeff: JsonInt,
        }
        #[derive(Serialize)]
        struct Repr {
            b: usize,
            terms: Vec<Term>,
        }
        Repr {
            b: self.b,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| Term {
                    indices: m.indices(),
                    coeff: JsonInt(c.clone()),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExteriorElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Term {
            indices: Vec<usize>,
            coeff: JsonInt,
        }
        #[derive(Deserialize)]
        struct Repr {
            b: usize,
            terms: Vec<Term>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.b > MAX_RANK {
            return Err(D::Error::custom(format!("rank {} exceeds {MAX_RANK}", repr.b)));
        }
        let mut out = ExteriorElement::zero(repr.b);
        for t in repr.terms {
            let m = MultiIndex::from_indices(&t.indices).map_err(D::Error::custom)?;
            if m.max_index() > repr.b {
                return Err(D::Error::custom(format!(
                    "indices {:?} exceed ambient rank {}",
                    t.indices, repr.b
                )));
            }
            out.add_term(m, t.coeff.0);
        }
        Ok(out)
    }
}
