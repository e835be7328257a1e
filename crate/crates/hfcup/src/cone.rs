//! The mapping-cone rank calculus over `F_2[U, U^-1]` for 0-surgery.
//!
//! In the canonical bases, both source and target of the surgery map are
//! free of rank `n` (4 in the model computation), the projection `P^{-K}`
//! is the identity, and the cone of `Psi = P^K + D^{-K} P^{-K}` has rank
//!
//! ```text
//! rk K_w + rk K_{z,w} - 2 rk(Psi)
//! ```
//!
//! The six-element set [`x_set`] lists the possible `D^{-K}` maps for the
//! rank-6 case: block-diagonal invertible constants `M` with
//! `rank(M + I) = 1`. Composing basepoint-sharing knots multiplies the `D`
//! maps, which drives the [`mn_rank`] induction: even compositions give the
//! identity (rank 8), odd ones stay in `X` (rank 6).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::laurent::LaurentMatrixF2;
use crate::{Error, Result};

/// One of the six possible `D^{-K}` matrices, tagged by its 1-based
/// position in the canonical listing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XMatrix {
    pub index: usize,
    pub matrix: LaurentMatrixF2,
}

/// The six constant 4x4 matrices over `F_2` that can represent `D^{-K}`:
/// block-diagonal with invertible 2x2 blocks, one block the identity and
/// the other at distance one from it.
pub fn x_set() -> Vec<XMatrix> {
    let mats = [
        [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]],
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 1, 1]],
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    ];
    mats.iter()
        .enumerate()
        .map(|(i, rows)| XMatrix {
            index: i + 1,
            matrix: LaurentMatrixF2::from_bits(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()),
        })
        .collect()
}

/// Canonical-basis model of the surgery triangle: `d_map` represents
/// `D^{-K}`, `p_minus` is the identity by the basis choice, and `p_plus`
/// represents `P^K = Theta^K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeModel {
    rank_kw: usize,
    rank_kzw: usize,
    d_map: LaurentMatrixF2,
    p_minus: LaurentMatrixF2,
    p_plus: LaurentMatrixF2,
}

impl ConeModel {
    /// Builds a model with `p_minus = I`. All three matrices must be square
    /// of the same size.
    pub fn new(d_map: LaurentMatrixF2, p_plus: LaurentMatrixF2) -> Result<Self> {
        let n = d_map.rows();
        if d_map.cols() != n || p_plus.rows() != n || p_plus.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "cone model wants square matrices of one size, got d {}x{}, p+ {}x{}",
                d_map.rows(),
                d_map.cols(),
                p_plus.rows(),
                p_plus.cols()
            )));
        }
        Ok(ConeModel {
            rank_kw: n,
            rank_kzw: n,
            d_map,
            p_minus: LaurentMatrixF2::identity(n),
            p_plus,
        })
    }

    /// The model with `p_plus = I` as well, the normalization forced in the
    /// rank-6 situation.
    pub fn canonical(d_map: LaurentMatrixF2) -> Result<Self> {
        let n = d_map.rows();
        ConeModel::new(d_map, LaurentMatrixF2::identity(n))
    }

    pub fn rank_kw(&self) -> usize {
        self.rank_kw
    }

    pub fn rank_kzw(&self) -> usize {
        self.rank_kzw
    }

    pub fn d_map(&self) -> &LaurentMatrixF2 {
        &self.d_map
    }

    pub fn p_plus(&self) -> &LaurentMatrixF2 {
        &self.p_plus
    }

    /// False when `p_plus` is not the identity, i.e. the model carries a
    /// `U^k` twist (`k != 0`) that the grading argument rules out. Such
    /// models are still evaluated; callers should surface the flag.
    pub fn is_canonical(&self) -> bool {
        self.p_plus.is_identity()
    }

    /// The surgery map `Psi = P^K + D^{-K} P^{-K}` on homology.
    pub fn psi(&self) -> LaurentMatrixF2 {
        let phi_minus = self.d_map.mul(&self.p_minus).expect("validated dims");
        self.p_plus.add(&phi_minus).expect("validated dims")
    }
}

impl Serialize for ConeModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rank_kw: usize,
            rank_kzw: usize,
            d_map: &'a LaurentMatrixF2,
            p_minus: &'a LaurentMatrixF2,
            p_plus: &'a LaurentMatrixF2,
        }
        Repr {
            rank_kw: self.rank_kw,
            rank_kzw: self.rank_kzw,
            d_map: &self.d_map,
            p_minus: &self.p_minus,
            p_plus: &self.p_plus,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConeModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rank_kw: Option<usize>,
            rank_kzw: Option<usize>,
            d_map: LaurentMatrixF2,
            p_minus: Option<LaurentMatrixF2>,
            p_plus: Option<LaurentMatrixF2>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let n = repr.d_map.rows();
        if let Some(p_minus) = &repr.p_minus {
            if !p_minus.is_identity() {
                return Err(D::Error::custom(
                    "p_minus must be the identity in the canonical basis",
                ));
            }
        }
        for (name, r) in [("rank_kw", repr.rank_kw), ("rank_kzw", repr.rank_kzw)] {
            if let Some(r) = r {
                if r != n {
                    return Err(D::Error::custom(format!(
                        "{name} = {r} disagrees with {n}x{n} matrices"
                    )));
                }
            }
        }
        let p_plus = repr.p_plus.unwrap_or_else(|| LaurentMatrixF2::identity(n));
        ConeModel::new(repr.d_map, p_plus).map_err(D::Error::custom)
    }
}

/// Rank of the homology of the mapping cone of `Psi`:
/// `rk K_w + rk K_{z,w} - 2 rk(Psi)`.
pub fn cone_rank(model: &ConeModel) -> usize {
    model.rank_kw + model.rank_kzw - 2 * model.psi().rank()
}

/// Composite `D` map of two composable knots sharing a basepoint:
/// the second map applied after the first, i.e. the product `d2 * d1`.
pub fn compose_d(d1: &LaurentMatrixF2, d2: &LaurentMatrixF2) -> Result<LaurentMatrixF2> {
    d2.mul(d1)
}

/// Rank of the predicted Floer module of the n-th model manifold, by the
/// composition induction: `D_0 = I`, `D_m = D_1 . D_{m-1}` with `D_1` the
/// first element of `X`. Returns 8 for even `n`, 6 for odd `n`.
pub fn mn_rank(n: u64) -> usize {
    let d1 = x_set().swap_remove(0).matrix;
    let mut d = LaurentMatrixF2::identity(4);
    for _ in 0..n {
        d = compose_d(&d, &d1).expect("4x4 composition");
    }
    let model = ConeModel::canonical(d).expect("square");
    cone_rank(&model)
}

/// All block-diagonal constant 4x4 matrices `M` over `F_2` with both 2x2
/// blocks invertible and `rank(M + I)` equal to the constraint. Constraint
/// 1 recovers exactly [`x_set`]; constraint 0 gives the identity alone.
pub fn enumerate_consistent_d(rank_constraint: usize) -> Result<Vec<LaurentMatrixF2>> {
    if rank_constraint > 1 {
        return Err(Error::InvalidRankConstraint(rank_constraint));
    }
    // GL_2(F_2) in a fixed order, identity first.
    let gl2: [[[u8; 2]; 2]; 6] = [
        [[1, 0], [0, 1]],
        [[1, 1], [0, 1]],
        [[1, 0], [1, 1]],
        [[0, 1], [1, 0]],
        [[0, 1], [1, 1]],
        [[1, 1], [1, 0]],
    ];
    let identity = LaurentMatrixF2::identity(4);
    let mut out = Vec::new();
    for lower in &gl2 {
        for upper in &gl2 {
            let rows = vec![
                vec![upper[0][0], upper[0][1], 0, 0],
                vec![upper[1][0], upper[1][1], 0, 0],
                vec![0, 0, lower[0][0], lower[0][1]],
                vec![0, 0, lower[1][0], lower[1][1]],
            ];
            let m = LaurentMatrixF2::from_bits(&rows);
            if m.add(&identity).expect("4x4").rank() == rank_constraint {
                out.push(m);
            }
        }
    }
    Ok(out)
}
