//! Exact-arithmetic vertex algebras with Rota-Baxter operators and
//! dendriform splittings, verified coefficient-exactly on finite windows.
//!
//! Everything is computed over the rationals with arbitrary precision:
//! there is no floating point and no tolerance anywhere. Identity checks
//! either certify an identity on an explicit window (with witness
//! exponents where the identity is of killed type) or produce the first
//! offending coefficient as a counterexample.

pub mod basis;
pub mod error;
pub mod kernel;
pub mod report;
pub mod rota_baxter;
pub mod rule;
pub mod scalar;
pub mod series;
pub mod subspace;
pub mod vector;
pub mod zoo;
