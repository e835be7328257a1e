//! Surgery-equivalence classification for first Betti number 3 and 4, and
//! the end-to-end pipeline cross-checking every rank computation.
//!
//! With `b_1 = 3` the class of a torsion-free manifold is the nonnegative
//! integer `n = |mu_123|`, realized by the model manifold `M_n`. With
//! `b_1 = 4` the form is dual to a vector in `Z^4` whose `GL_4(Z)`-orbit is
//! its gcd, so the class is `gcd` of the four triple values and the model
//! is `M_n # S^2 x S^1`. The predicted ranks depend only on the parity of
//! `n`: 8/6 for `b_1 = 3`, doubled to 16/12 by the connect-sum factor for
//! `b_1 = 4`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cone::mn_rank;
use crate::cup::{homology, TripleCupForm};
use crate::exec;
use crate::jsonnum::JsonInt;
use crate::{Error, Result};

/// Surgery-equivalence class of a torsion-free manifold with `b_1` 3 or 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryClass {
    pub b1: usize,
    /// Model index, nonnegative.
    pub n: BigInt,
}

impl SurgeryClass {
    /// Name of the model manifold realizing the class.
    pub fn model_name(&self) -> String {
        match self.b1 {
            3 => format!("M_{}", self.n),
            _ => format!("M_{} # S^2 x S^1", self.n),
        }
    }

    fn parity_even(&self) -> bool {
        self.n.is_even()
    }
}

/// Maps a form on rank 3 or 4 to its surgery-equivalence class.
pub fn classify(mu: &TripleCupForm) -> Result<SurgeryClass> {
    match mu.rank() {
        3 => Ok(SurgeryClass {
            b1: 3,
            n: mu.value(1, 2, 3).abs(),
        }),
        4 => {
            let values = [
                mu.value(1, 2, 3),
                mu.value(1, 2, 4),
                mu.value(1, 3, 4),
                mu.value(2, 3, 4),
            ];
            let n = values.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
            Ok(SurgeryClass { b1: 4, n })
        }
        other => Err(Error::UnsupportedBetti(other)),
    }
}

/// Predicted total `F_2` rank of the class's Floer module.
pub fn predicted_rank(cls: &SurgeryClass) -> usize {
    match (cls.b1, cls.parity_even()) {
        (3, true) => 8,
        (3, false) => 6,
        (_, true) => 16,
        (_, false) => 12,
    }
}

/// End-to-end report: the class, and the rank computed along every route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub b1: usize,
    pub n: BigInt,
    pub model: String,
    pub rank_classify: usize,
    pub rank_homology: usize,
    /// Mapping-cone rank; only computed for `b_1 = 3`.
    pub rank_cone: Option<usize>,
}

impl Serialize for PipelineReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PipelineReport", 6)?;
        s.serialize_field("b1", &self.b1)?;
        s.serialize_field("n", &JsonInt(self.n.clone()))?;
        s.serialize_field("model", &self.model)?;
        s.serialize_field("rank_classify", &self.rank_classify)?;
        s.serialize_field("rank_homology", &self.rank_homology)?;
        s.serialize_field("rank_cone", &self.rank_cone)?;
        s.end()
    }
}

/// Runs classification, complex homology and (for `b_1 = 3`) the
/// mapping-cone induction, and insists that all routes agree.
pub fn pipeline(mu: &TripleCupForm) -> Result<PipelineReport> {
    let cls = classify(mu)?;
    let rank_classify = predicted_rank(&cls);
    let rank_homology = homology(mu).f2_total;
    let rank_cone = if cls.b1 == 3 {
        // The induction only ever sees the parity of n, so clamp for
        // indices beyond machine range.
        let steps = cls.n.to_u64().unwrap_or_else(|| {
            if cls.n.is_even() {
                0
            } else {
                1
            }
        });
        Some(mn_rank(steps))
    } else {
        None
    };
    if rank_homology != rank_classify {
        return Err(Error::CrossCheck(format!(
            "homology rank {rank_homology} disagrees with class rank {rank_classify} for {mu:?}"
        )));
    }
    if let Some(rc) = rank_cone {
        if rc != rank_classify {
            return Err(Error::CrossCheck(format!(
                "cone rank {rc} disagrees with class rank {rank_classify} for {mu:?}"
            )));
        }
    }
    Ok(PipelineReport {
        b1: cls.b1,
        model: cls.model_name(),
        n: cls.n,
        rank_classify,
        rank_homology,
        rank_cone,
    })
}

/// [`pipeline`] over many forms; parallel under the `parallel` feature.
pub fn pipeline_batch(forms: &[TripleCupForm]) -> Vec<Result<PipelineReport>> {
    exec::map_slice(forms, pipeline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cup::change_basis;
    use crate::linalg::IntMatrix;

    fn form3(n: i64) -> TripleCupForm {
        TripleCupForm::new(3).with_value(1, 2, 3, n)
    }

    #[test]
    fn classify_rank_three() {
        let cls = classify(&form3(-5)).unwrap();
        assert_eq!(cls.b1, 3);
        assert_eq!(cls.n, BigInt::from(5));
        assert_eq!(cls.model_name(), "M_5");
        assert_eq!(predicted_rank(&cls), 6);

        let cls = classify(&TripleCupForm::new(3)).unwrap();
        assert_eq!(cls.n, BigInt::zero());
        assert_eq!(cls.model_name(), "M_0");
        assert_eq!(predicted_rank(&cls), 8);
    }

    #[test]
    fn classify_rank_four_gcd() {
        let mu = TripleCupForm::new(4).with_value(1, 2, 3, 2).with_value(1, 2, 4, 3);
        let cls = classify(&mu).unwrap();
        assert_eq!(cls.b1, 4);
        assert_eq!(cls.n, BigInt::from(1));
        assert_eq!(cls.model_name(), "M_1 # S^2 x S^1");
        assert_eq!(predicted_rank(&cls), 12);
        // Matches the homology computation.
        assert_eq!(homology(&mu).f2_total, 12);
    }

    #[test]
    fn classify_rejects_other_ranks() {
        assert!(matches!(
            classify(&TripleCupForm::new(5)),
            Err(Error::UnsupportedBetti(5))
        ));
        assert!(matches!(
            classify(&TripleCupForm::new(2)),
            Err(Error::UnsupportedBetti(2))
        ));
    }

    #[test]
    fn predicted_rank_table() {
        for (b1, n, want) in [(3usize, 1i64, 6usize), (3, 0, 8), (3, 4, 8), (4, 3, 12), (4, 0, 16)] {
            let cls = SurgeryClass {
                b1,
                n: BigInt::from(n),
            };
            assert_eq!(predicted_rank(&cls), want);
        }
    }

    #[test]
    fn pipeline_agrees_on_models() {
        let report = pipeline(&form3(1)).unwrap();
        assert_eq!(report.rank_classify, 6);
        assert_eq!(report.rank_homology, 6);
        assert_eq!(report.rank_cone, Some(6));

        let report = pipeline(&TripleCupForm::new(3)).unwrap();
        assert_eq!(report.rank_classify, 8);
        assert_eq!(report.rank_homology, 8);
        assert_eq!(report.rank_cone, Some(8));

        let report = pipeline(&TripleCupForm::new(4).with_value(1, 2, 3, 6)).unwrap();
        assert_eq!(report.rank_classify, 16);
        assert_eq!(report.rank_cone, None);
    }

    #[test]
    fn pipeline_random_rank_four() {
        let mut state = 0x5ca1ab1e5ca1ab1eu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let forms: Vec<TripleCupForm> = (0..25)
            .map(|_| {
                let mut mu = TripleCupForm::new(4);
                for (i, j, k) in [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)] {
                    mu.set(i, j, k, BigInt::from((next() % 11) as i64 - 5)).unwrap();
                }
                mu
            })
            .collect();
        for result in pipeline_batch(&forms) {
            let report = result.unwrap();
            assert_eq!(report.rank_classify, report.rank_homology);
        }
    }

    #[test]
    fn classify_invariant_under_change_of_basis() {
        let shears = [
            IntMatrix::from_rows(&[
                vec![1, 1, 0, 0],
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 2],
                vec![0, 0, 0, 1],
            ]),
            IntMatrix::from_rows(&[
                vec![0, 1, 0, 0],
                vec![1, 0, 0, 0],
                vec![0, 0, 0, 1],
                vec![0, 0, 1, 0],
            ]),
            IntMatrix::from_rows(&[
                vec![1, 0, 0, 0],
                vec![-3, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![1, 0, 0, 1],
            ]),
        ];
        let mu = TripleCupForm::new(4)
            .with_value(1, 2, 3, 6)
            .with_value(1, 3, 4, 10)
            .with_value(2, 3, 4, 15);
        let n0 = classify(&mu).unwrap().n;
        assert_eq!(n0, BigInt::from(1));
        for p in &shears {
            let pulled = change_basis(&mu, p).unwrap();
            assert_eq!(classify(&pulled).unwrap().n, n0, "under {p:?}");
        }
    }

    #[test]
    fn report_json_shape() {
        let report = pipeline(&form3(1)).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["b1"], 3);
        assert_eq!(v["n"], 1);
        assert_eq!(v["model"], "M_1");
        assert_eq!(v["rank_cone"], 6);

        let report = pipeline(&TripleCupForm::new(4)).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert!(v["rank_cone"].is_null());
    }
}
