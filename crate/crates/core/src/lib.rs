//! Cyclic codes with good Schur squares.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: prime-power fields, polynomials over them, and the splitting
//!   field that holds a primitive `n`-th root of unity.
//! * [`cyclotomic`]: index sets in `Z/nZ` (cyclotomic cosets, sumsets, amplitude).
//! * [`linear`]: generic generator matrices with the brute-force oracles
//!   (Schur squares by pairwise products, exhaustive minimum distance) and the
//!   Reed-Solomon / Reed-Muller reference codes.
//! * [`cyclic`]: cyclic codes described by their generating set, their squares,
//!   duals, BCH-type bounds and two independent square oracles.
//! * [`restricted`]: restricted q-ary weights, the walk-counting graph and the
//!   code families built from them, including the parameter tables.

pub mod algebra;
pub mod cyclic;
pub mod cyclotomic;
mod error;
pub mod linear;
pub mod restricted;

pub use error::{Error, Result};

/// Where a reported number came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Closed-form recurrence, no enumeration.
    Recurrence,
    /// Direct enumeration of index sets.
    Enumeration,
    /// Rank of an explicitly built generator matrix.
    RankOracle,
    /// Exhaustive codeword enumeration, or a witness matching a proven lower bound.
    ExhaustiveDistance,
    /// A bound that has not been certified tight.
    BoundOnly,
}
