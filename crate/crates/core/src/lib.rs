//! Truthful maximal-in-range mechanisms for multi-unit auctions.
//!
//! `m` identical items are split among `n` bidders with normalized, monotone
//! valuations. Every allocation rule here maximizes welfare exactly over a
//! range of allocations fixed by `(m, n)` and the rule's parameters, so VCG
//! payments ([`vcg`]) make them truthful:
//!
//! * [`ptas`]: optimal `t`-round allocation for k-minded bidders; welfare at
//!   least `t/(t+1)` of optimal.
//! * [`half`]: `n^2` equal bundles plus a remainder bundle for black-box
//!   valuations; welfare at least half of optimal.
//! * [`lift`]: turns any `t`-bidder maximal-in-range solver with ratio `alpha`
//!   into an `n`-bidder one with ratio `alpha - 1/(t+1)`.
//!
//! All arithmetic is on integers; welfare comparisons are exact.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bundles;
pub mod combinatorics;
mod error;
pub mod half;
pub mod lift;
mod model;
pub mod ptas;
pub mod valuation;
pub mod vcg;

pub use error::{Error, ValuationError};
pub use model::{
    is_t_round, validate_allocation, welfare, Allocation, Instance, Mechanism, MechanismResult,
    Ratio, Witness,
};
pub use valuation::{Bidder, KMinded, MarginalPiecewise, QueryCounted, Table, Valuation};

/// Item counts.
pub type Quantity = u64;

/// Non-negative money amounts.
pub type Value = u64;

/// Largest bid price, marginal or table entry accepted from external input.
pub const VALUE_CAP: Value = u32::MAX as Value;
