//! Verification toolkit for 0-APN power functions over GF(2^n).
//!
//! The crate provides:
//! - [`gf2poly`]: the polynomial ring GF(2)[x] with factorization,
//! - [`gf2n`]: arithmetic in GF(2^n),
//! - [`mpoly`]: sparse multivariate polynomials over GF(2) and resultant
//!   elimination,
//! - [`diffprops`]: exhaustive differential analysis of power maps,
//! - [`equiv`]: CCZ-equivalence of power exponents via cyclotomic cosets,
//! - [`verify`]: the family catalog and the symbolic certificate engine.
//!
//! With the default `parallel` feature the exhaustive scans and resultant
//! grid evaluations run on rayon; disabling it yields a fully sequential
//! build with identical results.

pub mod diffprops;
pub mod equiv;
pub mod expr;
pub mod gf2n;
pub mod gf2poly;
pub mod mpoly;
pub mod run;
pub mod verify;

pub use gf2n::{FieldCtx, Felt};
pub use gf2poly::{BitPoly, Factorization};
