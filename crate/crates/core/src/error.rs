use core::fmt;

use crate::{Quantity, Value};

/// Reasons a valuation representation is rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValuationError {
    /// A k-minded bid asks for zero items.
    ZeroQuantity,
    /// Two k-minded bids share a quantity.
    DuplicateQuantity(Quantity),
    /// Marginal-piecewise tuples must start at item 1.
    FirstBreakpointNotOne(Quantity),
    /// Marginal-piecewise breakpoints must be strictly increasing.
    BreakpointsNotIncreasing { index: usize },
    /// Marginal-piecewise list is empty.
    NoTuples,
    /// Table must hold at least `v(0)`.
    EmptyTable,
    /// Table must satisfy `v(0) = 0`.
    NotNormalized(Value),
    /// Table decreases at `index`.
    NonMonotone { index: usize },
}

impl fmt::Display for ValuationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroQuantity => write!(f, "bid quantity must be at least 1"),
            Self::DuplicateQuantity(q) => write!(f, "duplicate bid quantity {q}"),
            Self::FirstBreakpointNotOne(u) => {
                write!(f, "first breakpoint must be 1, found {u}")
            }
            Self::BreakpointsNotIncreasing { index } => {
                write!(f, "breakpoints not strictly increasing at tuple {index}")
            }
            Self::NoTuples => write!(f, "marginal-piecewise valuation needs at least one tuple"),
            Self::EmptyTable => write!(f, "table valuation is empty"),
            Self::NotNormalized(v) => write!(f, "v(0) must be 0, found {v}"),
            Self::NonMonotone { index } => write!(f, "table decreases at index {index}"),
        }
    }
}

/// Errors raised by instance construction, allocation checks and mechanisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Valuation {
        bidder: usize,
        source: ValuationError,
    },
    /// Supply must be at least one item.
    ZeroSupply,
    /// An instance needs at least one bidder.
    NoBidders,
    /// A table valuation does not cover exactly `0..=m`.
    TableLength {
        bidder: usize,
        expected: usize,
        found: usize,
    },
    /// Summed bidder values would not fit signed 64-bit payments.
    ValueOverflow,
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    Oversubscribed {
        total: u128,
        supply: Quantity,
    },
    /// A mechanism needs structural access the bidder does not offer.
    KindMismatch {
        bidder: usize,
        expected: &'static str,
    },
    /// Lift asked for more bidders than its inner solver supports.
    InnerCapacity {
        requested: usize,
        capacity: usize,
    },
    /// An inner solver broke its feasibility contract.
    InnerInfeasible {
        solver: &'static str,
    },
    /// An exhaustive routine refused an instance beyond its size limit.
    TooLarge {
        what: &'static str,
    },
    /// Utility requested for a result that carries no payments.
    MissingPayments,
    BidderOutOfRange {
        bidder: usize,
        bidders: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Valuation { bidder, source } => write!(f, "bidder {bidder}: {source}"),
            Self::ZeroSupply => write!(f, "item supply must be at least 1"),
            Self::NoBidders => write!(f, "instance has no bidders"),
            Self::TableLength {
                bidder,
                expected,
                found,
            } => write!(
                f,
                "bidder {bidder}: table has {found} entries, expected {expected}"
            ),
            Self::ValueOverflow => write!(f, "total bidder value does not fit in 63 bits"),
            Self::LengthMismatch { expected, found } => {
                write!(f, "allocation has {found} shares, expected {expected}")
            }
            Self::Oversubscribed { total, supply } => {
                write!(f, "allocation uses {total} items but only {supply} exist")
            }
            Self::KindMismatch { bidder, expected } => {
                write!(f, "bidder {bidder} must be {expected}")
            }
            Self::InnerCapacity {
                requested,
                capacity,
            } => write!(
                f,
                "inner solver handles at most {capacity} bidders, {requested} requested"
            ),
            Self::InnerInfeasible { solver } => {
                write!(
                    f,
                    "inner solver `{solver}` returned an infeasible allocation"
                )
            }
            Self::TooLarge { what } => write!(f, "instance too large for {what}"),
            Self::MissingPayments => write!(f, "result carries no payments"),
            Self::BidderOutOfRange { bidder, bidders } => {
                write!(f, "bidder {bidder} out of range for {bidders} bidders")
            }
        }
    }
}

impl core::error::Error for ValuationError {}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Self::Valuation { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    pub fn valuation(bidder: usize, source: ValuationError) -> Self {
        Self::Valuation { bidder, source }
    }
}
