use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::combinatorics::subsets_up_to;
use crate::valuation::{Bidder, Valuation, ValuationKind};
use crate::{Error, Quantity, Value};

/// Shares of the items, one entry per bidder. Need not use every item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Allocation(Vec<Quantity>);

impl Allocation {
    pub fn new(shares: Vec<Quantity>) -> Self {
        Self(shares)
    }

    pub fn empty(n: usize) -> Self {
        Self(alloc::vec![0; n])
    }

    pub fn total(&self) -> u128 {
        self.0.iter().map(|&s| u128::from(s)).sum()
    }

    pub fn into_inner(self) -> Vec<Quantity> {
        self.0
    }
}

impl Deref for Allocation {
    type Target = [Quantity];

    fn deref(&self) -> &[Quantity] {
        &self.0
    }
}

impl From<Vec<Quantity>> for Allocation {
    fn from(v: Vec<Quantity>) -> Self {
        Self(v)
    }
}

/// Supply `m` and an ordered list of bidder valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    m: Quantity,
    bidders: Vec<Valuation>,
}

impl Instance {
    /// Checks `m >= 1`, `n >= 1`, table lengths `m + 1`, and that the sum of
    /// all `v_i(m)` fits in `i64` so welfare and signed payments never overflow.
    pub fn new(m: Quantity, bidders: Vec<Valuation>) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::ZeroSupply);
        }
        if bidders.is_empty() {
            return Err(Error::NoBidders);
        }
        let mut total: u128 = 0;
        for (i, v) in bidders.iter().enumerate() {
            if let Valuation::Table(t) = v {
                let expected = usize::try_from(m).ok().and_then(|m| m.checked_add(1));
                if expected != Some(t.values().len()) {
                    return Err(Error::TableLength {
                        bidder: i,
                        expected: expected.unwrap_or(usize::MAX),
                        found: t.values().len(),
                    });
                }
            }
            total += u128::from(v.value(m));
        }
        if total > i64::MAX as u128 {
            return Err(Error::ValueOverflow);
        }
        Ok(Self { m, bidders })
    }

    pub fn m(&self) -> Quantity {
        self.m
    }

    pub fn n(&self) -> usize {
        self.bidders.len()
    }

    pub fn bidders(&self) -> &[Valuation] {
        &self.bidders
    }

    pub fn bidder_refs(&self) -> Vec<&dyn Bidder> {
        self.bidders.iter().map(|v| v as &dyn Bidder).collect()
    }

    /// Same instance with bidder `i` replaced by `v`.
    pub fn with_bidder(&self, i: usize, v: Valuation) -> Result<Self, Error> {
        if i >= self.n() {
            return Err(Error::BidderOutOfRange {
                bidder: i,
                bidders: self.n(),
            });
        }
        let mut bidders = self.bidders.clone();
        bidders[i] = v;
        Self::new(self.m, bidders)
    }

    /// Same instance with bidder `i` reporting the zero valuation of its kind.
    pub fn with_zeroed(&self, i: usize) -> Result<Self, Error> {
        let zero = self
            .bidders
            .get(i)
            .ok_or(Error::BidderOutOfRange {
                bidder: i,
                bidders: self.n(),
            })?
            .zero_like();
        self.with_bidder(i, zero)
    }

    /// `Some(kind)` when every bidder uses the same representation.
    pub fn uniform_kind(&self) -> Option<ValuationKind> {
        let first = self.bidders[0].kind();
        self.bidders
            .iter()
            .all(|v| v.kind() == first)
            .then_some(first)
    }
}

pub fn validate_allocation(instance: &Instance, allocation: &[Quantity]) -> Result<(), Error> {
    check_shares(instance.m(), instance.n(), allocation)
}

pub(crate) fn check_shares(m: Quantity, n: usize, shares: &[Quantity]) -> Result<(), Error> {
    if shares.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: shares.len(),
        });
    }
    let total: u128 = shares.iter().map(|&s| u128::from(s)).sum();
    if total > u128::from(m) {
        return Err(Error::Oversubscribed { total, supply: m });
    }
    Ok(())
}

/// `sum_i v_i(s_i)` after checking the allocation.
pub fn welfare(instance: &Instance, allocation: &[Quantity]) -> Result<Value, Error> {
    validate_allocation(instance, allocation)?;
    Ok(sum_values(&instance.bidder_refs(), allocation))
}

pub(crate) fn sum_values(bidders: &[&dyn Bidder], shares: &[Quantity]) -> Value {
    bidders
        .iter()
        .zip(shares)
        .map(|(b, &s)| if s == 0 { 0 } else { b.value(s) })
        .sum()
}

/// Squared count that sizes the bundle grid outside `T`.
///
/// `(n - t)^2` for `t < n`; when `t >= n` the whole allocation space is already
/// in range through `T = everyone`, and `(n - |T|)^2` is used for smaller sets.
pub(crate) fn round_divisor(n: usize, t: usize, members: usize) -> u64 {
    let d = if t < n { n - t } else { n - members };
    (d as u64) * (d as u64)
}

/// Whether `allocation` is `t`-round: some `T` with `|T| <= t` leaves every
/// other share a multiple of `b = max((m - l) / (n - t)^2, 1)` with those
/// shares summing to at most `b (n - t)^2`, where `l` is what `T` holds.
///
/// Exhaustive over subsets; meant for small `n`.
pub fn is_t_round(m: Quantity, n: usize, allocation: &[Quantity], t: usize) -> bool {
    if check_shares(m, n, allocation).is_err() {
        return false;
    }
    subsets_up_to(n, t).iter().any(|members| {
        if members.len() == n {
            return true;
        }
        let l: Quantity = members.iter().map(|&i| allocation[i]).sum();
        let d = round_divisor(n, t, members.len());
        let b = ((m - l) / d).max(1);
        let mut outside: u128 = 0;
        for (i, &s) in allocation.iter().enumerate() {
            if members.contains(&i) {
                continue;
            }
            if s % b != 0 {
                return false;
            }
            outside += u128::from(s);
        }
        outside <= u128::from(b) * u128::from(d)
    })
}

/// Exact non-negative fraction, used for approximation guarantees and ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    /// `alpha - 1/(t+1)`, floored at zero.
    pub fn minus_reciprocal(self, t: usize) -> Self {
        let t1 = t as u64 + 1;
        let lhs = u128::from(self.num) * u128::from(t1);
        let rhs = u128::from(self.den);
        let num = lhs.saturating_sub(rhs);
        Self::new(num as u64, self.den * t1)
    }

    /// `achieved >= self * optimum`, exactly.
    pub fn is_met(self, achieved: Value, optimum: Value) -> bool {
        u128::from(achieved) * u128::from(self.den) >= u128::from(optimum) * u128::from(self.num)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Parameters that place an output inside its mechanism's declared range.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "range", rename_all = "snake_case"))]
pub enum Witness {
    /// `t`-round allocation: `members` hold `level` items at bid quantities,
    /// everyone else holds `bundle_counts[i]` bundles of `bundle_size`.
    TRound {
        members: Vec<usize>,
        level: Quantity,
        bundle_size: Quantity,
        bundle_counts: Vec<Quantity>,
    },
    /// Whole regular bundles plus at most one remainder bundle.
    Bundles {
        bundle_size: Quantity,
        bundle_count: Quantity,
        remainder: Quantity,
        remainder_holder: Option<usize>,
        bundle_counts: Vec<Quantity>,
    },
    /// Inner solver on `members` with `m - level` items; `level` items cut
    /// into bundles for the rest.
    Lift {
        members: Vec<usize>,
        level: Quantity,
        bundle_size: Quantity,
        bundle_counts: Vec<Quantity>,
        inner_shares: Vec<Quantity>,
    },
    /// Every allocation is in range.
    Full,
    /// No declared range.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MechanismResult {
    pub allocation: Allocation,
    pub welfare: Value,
    /// Signed: some payment rules pay bidders.
    pub payments: Option<Vec<i64>>,
    pub witness: Witness,
}

/// An allocation rule over value-query bidders.
pub trait Mechanism {
    fn id(&self) -> &'static str;

    fn run(&self, m: Quantity, bidders: &[&dyn Bidder]) -> Result<MechanismResult, Error>;

    fn solve(&self, instance: &Instance) -> Result<MechanismResult, Error> {
        self.run(instance.m(), &instance.bidder_refs())
    }

    /// The declared range for `(m, n)`, listed in full. Only sensible at test
    /// scale; `None` when the rule is not maximal-in-range.
    fn range(&self, _m: Quantity, _n: usize) -> Option<Vec<Allocation>> {
        None
    }

    /// Worst-case fraction of optimal welfare, if the rule promises one.
    fn guarantee(&self, _n: usize) -> Option<Ratio> {
        None
    }
}
