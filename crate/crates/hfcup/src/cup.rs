//! The cup-product chain complex on `Λ*(Z^b)`.
//!
//! A [`TripleCupForm`] is an alternating integral trilinear form, stored as
//! its values on strictly increasing index triples. Contraction against the
//! form defines the degree `-3` differential
//!
//! ```text
//! d3(e_S) = sum over 3-subsets T = {a<b<c} of S of
//!           shuffle_sign(T, S) * mu_abc * e_{S \ T}
//! ```
//!
//! which squares to zero for every form. [`homology`] computes the homology
//! of `(Λ*, d3)` degreewise over `Z` (via Smith normal form) and over `F_2`;
//! the total `F_2` rank is the predicted rank of the associated Floer
//! module.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exec;
use crate::exterior::{basis, monomial_shuffle_sign, ExteriorElement, MultiIndex, MAX_RANK};
use crate::jsonnum::{self, JsonInt};
use crate::linalg::{rank_f2, smith_normal_form, snf_full, IntMatrix};
use crate::{Error, Result};

/// Alternating trilinear form on `Z^b`, determined by its values
/// `mu_{ijk}` on triples `i < j < k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleCupForm {
    b: usize,
    values: BTreeMap<[usize; 3], BigInt>,
}

impl TripleCupForm {
    pub fn new(b: usize) -> Self {
        assert!(b <= MAX_RANK);
        TripleCupForm {
            b,
            values: BTreeMap::new(),
        }
    }

    /// Sets `mu_{ijk}` for a strictly increasing triple.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: BigInt) -> Result<()> {
        if !(1 <= i && i < j && j < k && k <= self.b) {
            return Err(Error::InvalidTriple {
                i,
                j,
                k,
                b: self.b,
            });
        }
        if value.is_zero() {
            self.values.remove(&[i, j, k]);
        } else {
            self.values.insert([i, j, k], value);
        }
        Ok(())
    }

    pub fn with_value(mut self, i: usize, j: usize, k: usize, value: i64) -> Self {
        self.set(i, j, k, BigInt::from(value)).expect("valid triple");
        self
    }

    pub fn rank(&self) -> usize {
        self.b
    }

    /// `mu_{ijk}` for `i < j < k`; unset triples are zero.
    pub fn value(&self, i: usize, j: usize, k: usize) -> BigInt {
        self.values
            .get(&[i, j, k])
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 3], &BigInt)> {
        self.values.iter()
    }

    /// Orthogonal direct sum: `other`'s indices are shifted past `self.b`.
    pub fn direct_sum(&self, other: &TripleCupForm) -> TripleCupForm {
        let mut out = TripleCupForm::new(self.b + other.b);
        out.values = self.values.clone();
        for ([i, j, k], v) in &other.values {
            out.values
                .insert([i + self.b, j + self.b, k + self.b], v.clone());
        }
        out
    }
}

impl Serialize for TripleCupForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            ijk: [usize; 3],
            value: JsonInt,
        }
        #[derive(Serialize)]
        struct Repr {
            b: usize,
            mu: Vec<Entry>,
        }
        Repr {
            b: self.b,
            mu: self
                .values
                .iter()
                .map(|(&ijk, v)| Entry {
                    ijk,
                    value: JsonInt(v.clone()),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TripleCupForm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Entry {
            ijk: [usize; 3],
            value: JsonInt,
        }
        #[derive(Deserialize)]
        struct Repr {
            b: usize,
            mu: Vec<Entry>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.b > MAX_RANK {
            return Err(D::Error::custom(format!("rank {} exceeds {MAX_RANK}", repr.b)));
        }
        let mut form = TripleCupForm::new(repr.b);
        for e in repr.mu {
            let [i, j, k] = e.ijk;
            if form.values.contains_key(&e.ijk) {
                return Err(D::Error::custom(format!("duplicate triple {:?}", e.ijk)));
            }
            form.set(i, j, k, e.value.0).map_err(D::Error::custom)?;
        }
        Ok(form)
    }
}

/// `d3` applied to one basis monomial, as (monomial, coefficient) pairs.
fn d3_monomial(mu: &TripleCupForm, s: MultiIndex) -> Vec<(MultiIndex, BigInt)> {
    let indices = s.indices();
    let deg = indices.len();
    if deg < 3 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for p in 0..deg {
        for q in p + 1..deg {
            for r in q + 1..deg {
                let (i, j, k) = (indices[p], indices[q], indices[r]);
                let v = mu.value(i, j, k);
                if v.is_zero() {
                    continue;
                }
                let t = MultiIndex::from_indices(&[i, j, k]).expect("sorted triple");
                let sign = monomial_shuffle_sign(t, s).expect("t is a 3-subset of s");
                out.push((s.difference(&t), if sign > 0 { v } else { -v }));
            }
        }
    }
    out
}

/// Contraction of `x` against the 3-form: linear, lowers degree by 3.
pub fn d3(mu: &TripleCupForm, x: &ExteriorElement) -> Result<ExteriorElement> {
    if x.ambient_rank() != mu.b {
        return Err(Error::AmbientRankMismatch {
            left: mu.b,
            right: x.ambient_rank(),
        });
    }
    let mut out = ExteriorElement::zero(mu.b);
    for (s, c) in x.terms() {
        for (m, v) in d3_monomial(mu, *s) {
            out.add_term(m, v * c);
        }
    }
    Ok(out)
}

/// Matrix of `d3: Λ^degree -> Λ^{degree-3}` in the enumeration order of
/// [`basis`], columns indexed by the domain.
pub fn d3_matrix(mu: &TripleCupForm, degree: usize) -> Result<IntMatrix> {
    if degree < 3 || degree > mu.b {
        return Err(Error::DegreeOutOfRange { degree, b: mu.b });
    }
    let dom = basis(mu.b, degree);
    let cod = basis(mu.b, degree - 3);
    let columns: Vec<Vec<(usize, BigInt)>> = exec::map_range(dom.len(), |j| {
        d3_monomial(mu, dom[j])
            .into_iter()
            .map(|(m, v)| {
                let row = cod.binary_search(&m).expect("monomial in codomain basis");
                (row, v)
            })
            .collect()
    });
    let mut m = IntMatrix::zero(cod.len(), dom.len());
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Homology of one degree over `Z` and `F_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHomology {
    pub degree: usize,
    /// Free rank over `Z`.
    pub z_rank: usize,
    /// Torsion invariant factors, each > 1, in divisibility order.
    pub torsion: Vec<BigInt>,
    pub f2_rank: usize,
}

/// Degreewise homology of `(Λ*, d3)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyReport {
    pub degrees: Vec<DegreeHomology>,
    /// Total rank over `F_2`: the predicted Floer rank.
    pub f2_total: usize,
}

impl Serialize for HomologyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct DegreeRepr {
            deg: usize,
            z_rank: usize,
            torsion: Vec<JsonInt>,
            f2_rank: usize,
        }
        #[derive(Serialize)]
        struct Repr {
            degrees: Vec<DegreeRepr>,
            f2_total: usize,
        }
        Repr {
            degrees: self
                .degrees
                .iter()
                .map(|d| DegreeRepr {
                    deg: d.degree,
                    z_rank: d.z_rank,
                    torsion: jsonnum::wrap(&d.torsion),
                    f2_rank: d.f2_rank,
                })
                .collect(),
            f2_total: self.f2_total,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HomologyReport {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct DegreeRepr {
            deg: usize,
            z_rank: usize,
            torsion: Vec<JsonInt>,
            f2_rank: usize,
        }
        #[derive(Deserialize)]
        struct Repr {
            degrees: Vec<DegreeRepr>,
            f2_total: usize,
        }
        let repr = Repr::deserialize(deserializer)?;
        Ok(HomologyReport {
            degrees: repr
                .degrees
                .into_iter()
                .map(|d| DegreeHomology {
                    degree: d.deg,
                    z_rank: d.z_rank,
                    torsion: jsonnum::unwrap(d.torsion),
                    f2_rank: d.f2_rank,
                })
                .collect(),
            f2_total: repr.f2_total,
        })
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).expect("binomial fits usize")
}

/// Free rank and torsion of `ker(a_out) / im(b_in)` over `Z`.
///
/// `a_out` is the differential leaving the degree, `b_in` the one entering
/// it; `a_out * b_in = 0` is the caller's responsibility.
fn homology_z(a_out: &IntMatrix, b_in: &IntMatrix) -> (usize, Vec<BigInt>) {
    let dim = a_out.cols();
    debug_assert_eq!(dim, b_in.rows());
    let dec = snf_full(a_out);
    let nullity = dim - dec.rank;
    // Coordinates of the incoming image in the SNF column basis; rows past
    // the rank are the kernel components, rows before it must vanish.
    let coords = dec.v_inv.mul(b_in).expect("dims agree");
    debug_assert!((0..dec.rank).all(|i| (0..coords.cols()).all(|j| coords[(i, j)].is_zero())));
    let in_kernel = coords.submatrix(dec.rank, dim, 0, coords.cols());
    let snf = smith_normal_form(&in_kernel);
    (nullity - snf.rank, snf.torsion_factors)
}

/// Degreewise homology of the complex `(Λ*(Z^b), d3)`, over `Z` and `F_2`.
pub fn homology(mu: &TripleCupForm) -> HomologyReport {
    let b = mu.b;
    // out[d] = matrix of d3 leaving degree d (trivial for d < 3).
    let out: Vec<IntMatrix> = (0..=b)
        .map(|d| {
            if d >= 3 {
                d3_matrix(mu, d).expect("degree in range")
            } else {
                IntMatrix::zero(0, binomial(b, d))
            }
        })
        .collect();
    for d in 6..=b {
        let composed = out[d - 3].mul(&out[d]).expect("dims agree");
        assert!(composed.is_zero(), "d3 . d3 != 0 leaving degree {d}");
    }

    let empty_in: Vec<IntMatrix> = (0..=b).map(|d| IntMatrix::zero(binomial(b, d), 0)).collect();
    let degrees: Vec<DegreeHomology> = (0..=b)
        .map(|d| {
            let a_out = &out[d];
            let b_in = if d + 3 <= b { &out[d + 3] } else { &empty_in[d] };
            let dim = binomial(b, d);
            let f2_rank = dim - rank_f2(a_out) - rank_f2(b_in);
            let (z_rank, torsion) = homology_z(a_out, b_in);
            DegreeHomology {
                degree: d,
                z_rank,
                torsion,
                f2_rank,
            }
        })
        .collect();
    let f2_total = degrees.iter().map(|d| d.f2_rank).sum();
    HomologyReport { degrees, f2_total }
}

/// [`homology`] over many forms; parallel under the `parallel` feature.
pub fn homology_batch(forms: &[TripleCupForm]) -> Vec<HomologyReport> {
    exec::map_slice(forms, homology)
}

fn minor3(p: &IntMatrix, rows: [usize; 3], cols: [usize; 3]) -> BigInt {
    let e = |i: usize, j: usize| &p[(rows[i], cols[j])];
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

/// Pullback of the form along a unimodular change of basis:
/// `mu'(u, v, w) = mu(p u, p v, p w)`, expanded multilinearly. Since the
/// form alternates, the coefficient of `mu_{abc}` in `mu'_{ijk}` is the
/// 3x3 minor of `p` on rows `{a,b,c}` and columns `{i,j,k}`.
pub fn change_basis(mu: &TripleCupForm, p: &IntMatrix) -> Result<TripleCupForm> {
    if !p.is_square() || p.rows() != mu.b {
        return Err(Error::DimensionMismatch(format!(
            "change of basis on rank {} by {}x{}",
            mu.b,
            p.rows(),
            p.cols()
        )));
    }
    let det = p.det()?;
    if !num_traits::Signed::abs(&det).is_one() {
        return Err(Error::NotUnimodular { det });
    }
    let mut out = TripleCupForm::new(mu.b);
    for target in basis(mu.b, 3) {
        let ijk = target.indices();
        let mut acc = BigInt::zero();
        for ([a, bb, cc], v) in &mu.values {
            let m = minor3(p, [a - 1, bb - 1, cc - 1], [ijk[0] - 1, ijk[1] - 1, ijk[2] - 1]);
            acc += m * v;
        }
        out.set(ijk[0], ijk[1], ijk[2], acc)?;
    }
    Ok(out)
}
