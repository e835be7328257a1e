//! Exact-arithmetic kernels for predicting `HF^inf` of a closed oriented
//! 3-manifold from its integral triple cup product form.
//!
//! The crate is organized around three computational pillars:
//!
//! * [`cup`] — the exterior-algebra complex on `Z^b` whose differential is
//!   contraction against a triple cup product form, with homology over `Z`
//!   and `F_2` ([`exterior`] supplies the wedge calculus, [`linalg`] the
//!   Smith normal form).
//! * [`cone`] — the mapping-cone rank formula for 0-surgery over
//!   `F_2[U, U^-1]`, the six-element matrix set `X`, and the induction
//!   computing the model-manifold ranks 8 and 6 ([`laurent`] supplies
//!   matrices over `F_2[U, U^-1]`).
//! * [`lattice`] — discriminant groups and Q/Z-valued discriminant-bilinear
//!   forms of integral lattices, stable-equivalence testing, and a verified
//!   search for homologically split (diagonal) surgery presentations.
//!
//! [`classify`] ties the pillars together: it maps a form with `b_1 = 3` or
//! `4` to its surgery-equivalence class and cross-checks the predicted rank
//! along every available route.
//!
//! Everything is exact: integers are arbitrary precision, `Q/Z` values are
//! exact rationals, and no floating point appears anywhere.
//!
//! With the default `parallel` feature, batch entry points and matrix
//! assembly distribute work with rayon; disabling the feature compiles the
//! same code paths sequentially.

pub mod classify;
pub mod cone;
pub mod cup;
pub mod exterior;
pub mod lattice;
pub mod laurent;
pub mod linalg;

mod error;
mod exec;
mod jsonnum;

pub use error::{Error, Result};
