//! Valuation representations and the value-query interface.
//!
//! Every valuation is normalized (`v(0) = 0`) and non-decreasing. The three
//! concrete kinds are k-minded XOR bids, marginal-piecewise tuples and
//! explicit tables; mechanisms talk to all of them through [`Bidder`].

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::ValuationError;
use crate::{Quantity, Value};

/// Value-query access to a bidder.
///
/// `valuation` exposes the underlying representation for solvers that need
/// more than value queries (the k-minded and marginal-piecewise inner solvers).
pub trait Bidder {
    fn value(&self, q: Quantity) -> Value;

    fn valuation(&self) -> Option<&Valuation> {
        None
    }
}

/// XOR bids: `v(q)` is the best price among bids asking for at most `q` items.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KMinded {
    bids: Vec<(Quantity, Value)>,
    #[cfg_attr(feature = "serde", serde(skip))]
    prefix_best: Vec<Value>,
}

impl KMinded {
    /// Builds from `(quantity, price)` pairs in any order. Quantities must be
    /// positive and distinct.
    pub fn new(mut bids: Vec<(Quantity, Value)>) -> Result<Self, ValuationError> {
        bids.sort_unstable();
        for (i, &(q, _)) in bids.iter().enumerate() {
            if q == 0 {
                return Err(ValuationError::ZeroQuantity);
            }
            if i > 0 && bids[i - 1].0 == q {
                return Err(ValuationError::DuplicateQuantity(q));
            }
        }
        let prefix_best = bids
            .iter()
            .scan(0, |best, &(_, p)| {
                *best = (*best).max(p);
                Some(*best)
            })
            .collect();
        Ok(Self { bids, prefix_best })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Bids sorted by quantity.
    pub fn bids(&self) -> &[(Quantity, Value)] {
        &self.bids
    }

    pub fn value(&self, q: Quantity) -> Value {
        match self.bids.partition_point(|&(bq, _)| bq <= q) {
            0 => 0,
            idx => self.prefix_best[idx - 1],
        }
    }
}

/// Per-item marginals that are constant between breakpoints `u_1 = 1 < u_2 < ...`.
///
/// Item `j` is worth `m_l` for the unique `l` with `u_l <= j < u_{l+1}`; the
/// last marginal extends to every later item.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MarginalPiecewise {
    tuples: Vec<(Quantity, Value)>,
    /// `v(u_j - 1)` for each tuple, wide enough that no prefix overflows.
    #[cfg_attr(feature = "serde", serde(skip))]
    base: Vec<u128>,
}

impl MarginalPiecewise {
    pub fn new(tuples: Vec<(Quantity, Value)>) -> Result<Self, ValuationError> {
        let first = tuples.first().ok_or(ValuationError::NoTuples)?;
        if first.0 != 1 {
            return Err(ValuationError::FirstBreakpointNotOne(first.0));
        }
        let mut base = Vec::with_capacity(tuples.len());
        base.push(0u128);
        for j in 1..tuples.len() {
            let (prev_u, prev_m) = tuples[j - 1];
            let u = tuples[j].0;
            if u <= prev_u {
                return Err(ValuationError::BreakpointsNotIncreasing { index: j });
            }
            let span = u128::from(u - prev_u);
            base.push(base[j - 1] + span * u128::from(prev_m));
        }
        Ok(Self { tuples, base })
    }

    pub fn zero() -> Self {
        Self {
            tuples: alloc::vec![(1, 0)],
            base: alloc::vec![0],
        }
    }

    pub fn tuples(&self) -> &[(Quantity, Value)] {
        &self.tuples
    }

    /// Closed-form sum of the first `q` marginals, saturating at `u64::MAX`.
    pub fn value(&self, q: Quantity) -> Value {
        if q == 0 {
            return 0;
        }
        let j = self.tuples.partition_point(|&(u, _)| u <= q) - 1;
        let (u, marginal) = self.tuples[j];
        let total = self.base[j] + u128::from(q - u + 1) * u128::from(marginal);
        Value::try_from(total).unwrap_or(Value::MAX)
    }

    /// Item counts after which the marginal changes: `u_j - 1` for `j >= 2`.
    pub fn breakpoints(&self) -> impl Iterator<Item = Quantity> + '_ {
        self.tuples.iter().skip(1).map(|&(u, _)| u - 1)
    }
}

/// Explicit `v(0), v(1), ..., v(m)`; queries past the end repeat the last entry.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Table {
    values: Vec<Value>,
}

impl Table {
    pub fn new(values: Vec<Value>) -> Result<Self, ValuationError> {
        match values.first() {
            None => return Err(ValuationError::EmptyTable),
            Some(&v0) if v0 != 0 => return Err(ValuationError::NotNormalized(v0)),
            _ => {}
        }
        if let Some(index) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(ValuationError::NonMonotone { index: index + 1 });
        }
        Ok(Self { values })
    }

    pub fn zero(m: Quantity) -> Self {
        Self {
            values: alloc::vec![0; m as usize + 1],
        }
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn value(&self, q: Quantity) -> Value {
        let last = self.values.len() - 1;
        self.values[usize::try_from(q).map_or(last, |q| q.min(last))]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationKind {
    KMinded,
    MarginalPiecewise,
    Table,
}

impl ValuationKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::KMinded => "k_minded",
            Self::MarginalPiecewise => "marginal_piecewise",
            Self::Table => "table",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Valuation {
    KMinded(KMinded),
    MarginalPiecewise(MarginalPiecewise),
    Table(Table),
}

impl Valuation {
    pub fn kind(&self) -> ValuationKind {
        match self {
            Self::KMinded(_) => ValuationKind::KMinded,
            Self::MarginalPiecewise(_) => ValuationKind::MarginalPiecewise,
            Self::Table(_) => ValuationKind::Table,
        }
    }

    pub fn value(&self, q: Quantity) -> Value {
        match self {
            Self::KMinded(v) => v.value(q),
            Self::MarginalPiecewise(v) => v.value(q),
            Self::Table(v) => v.value(q),
        }
    }

    /// The zero valuation in the same representation (tables keep their length).
    pub fn zero_like(&self) -> Self {
        match self {
            Self::KMinded(_) => Self::KMinded(KMinded::zero()),
            Self::MarginalPiecewise(_) => Self::MarginalPiecewise(MarginalPiecewise::zero()),
            Self::Table(t) => Self::Table(Table {
                values: alloc::vec![0; t.values.len()],
            }),
        }
    }

    pub fn as_k_minded(&self) -> Option<&KMinded> {
        match self {
            Self::KMinded(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_piecewise(&self) -> Option<&MarginalPiecewise> {
        match self {
            Self::MarginalPiecewise(v) => Some(v),
            _ => None,
        }
    }
}

impl From<KMinded> for Valuation {
    fn from(v: KMinded) -> Self {
        Self::KMinded(v)
    }
}

impl From<MarginalPiecewise> for Valuation {
    fn from(v: MarginalPiecewise) -> Self {
        Self::MarginalPiecewise(v)
    }
}

impl From<Table> for Valuation {
    fn from(v: Table) -> Self {
        Self::Table(v)
    }
}

impl Bidder for Valuation {
    fn value(&self, q: Quantity) -> Value {
        Valuation::value(self, q)
    }

    fn valuation(&self) -> Option<&Valuation> {
        Some(self)
    }
}

impl<B: Bidder + ?Sized> Bidder for &B {
    fn value(&self, q: Quantity) -> Value {
        (**self).value(q)
    }

    fn valuation(&self) -> Option<&Valuation> {
        (**self).valuation()
    }
}

/// Wraps a bidder and records every distinct quantity it was asked about.
///
/// One wrapper per bidder per mechanism run; the counter is not shared across
/// threads.
pub struct QueryCounted<'a> {
    inner: &'a dyn Bidder,
    seen: RefCell<BTreeSet<Quantity>>,
}

impl<'a> QueryCounted<'a> {
    pub fn new(inner: &'a dyn Bidder) -> Self {
        Self {
            inner,
            seen: RefCell::new(BTreeSet::new()),
        }
    }

    /// Number of distinct quantities queried since construction or the last reset.
    pub fn distinct_queries(&self) -> usize {
        self.seen.borrow().len()
    }

    pub fn reset(&self) {
        self.seen.borrow_mut().clear();
    }
}

impl Bidder for QueryCounted<'_> {
    fn value(&self, q: Quantity) -> Value {
        self.seen.borrow_mut().insert(q);
        self.inner.value(q)
    }

    fn valuation(&self) -> Option<&Valuation> {
        self.inner.valuation()
    }
}

/// Checks `v(s) + v(t) >= v(s + t)` for every `s + t <= m`. Quadratic in `m`.
pub fn is_subadditive(v: &dyn Bidder, m: Quantity) -> bool {
    let table: Vec<u128> = (0..=m).map(|q| u128::from(v.value(q))).collect();
    let m = m as usize;
    (1..=m).all(|s| (1..=m - s).all(|t| table[s] + table[t] >= table[s + t]))
}

/// `v'(0) = 0` and `v'(s) = v(s) + v(m)` for `s >= 1`, in the same representation.
pub fn subadditive_closure(v: &Valuation, m: Quantity) -> Valuation {
    let top = v.value(m);
    match v {
        Valuation::KMinded(k) => {
            let mut bids: Vec<(Quantity, Value)> = k
                .bids()
                .iter()
                .filter(|&&(_, p)| p > 0)
                .map(|&(q, p)| (q, p.saturating_add(top)))
                .collect();
            if top > 0 && bids.first().is_none_or(|&(q, _)| q != 1) {
                bids.push((1, top));
            }
            KMinded::new(bids)
                .expect("shifted bids keep distinct positive quantities")
                .into()
        }
        Valuation::MarginalPiecewise(pw) => {
            let src = pw.tuples();
            let mut tuples = Vec::with_capacity(src.len() + 1);
            tuples.push((1, src[0].1.saturating_add(top)));
            if src.get(1).is_none_or(|&(u, _)| u != 2) {
                tuples.push((2, src[0].1));
            }
            tuples.extend_from_slice(&src[1..]);
            MarginalPiecewise::new(tuples)
                .expect("breakpoints stay increasing")
                .into()
        }
        Valuation::Table(t) => {
            let values = t
                .values()
                .iter()
                .enumerate()
                .map(|(q, &x)| if q == 0 { 0 } else { x.saturating_add(top) })
                .collect();
            Table::new(values).expect("shift keeps monotonicity").into()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn one_point(threshold: Quantity, value: Value) -> Valuation {
        KMinded::new(vec![(threshold, value)]).unwrap().into()
    }

    #[test]
    fn k_minded_examples() {
        let v = KMinded::new(vec![(7, 9), (3, 5)]).unwrap();
        assert_eq!(v.value(2), 0);
        assert_eq!(v.value(3), 5);
        assert_eq!(v.value(10), 9);
        assert_eq!(v.value(0), 0);
    }

    #[test]
    fn k_minded_rejects_bad_bids() {
        assert_eq!(
            KMinded::new(vec![(0, 1)]),
            Err(ValuationError::ZeroQuantity)
        );
        assert_eq!(
            KMinded::new(vec![(4, 1), (4, 2)]),
            Err(ValuationError::DuplicateQuantity(4))
        );
        assert_eq!(KMinded::new(vec![]).unwrap().value(100), 0);
    }

    #[test]
    fn zero_priced_bid_is_inert() {
        let v = KMinded::new(vec![(2, 0), (5, 3)]).unwrap();
        assert_eq!(v.value(4), 0);
        assert_eq!(v.value(5), 3);
    }

    #[test]
    fn piecewise_examples() {
        let v = MarginalPiecewise::new(vec![(1, 3), (4, 1)]).unwrap();
        assert_eq!(v.value(0), 0);
        assert_eq!(v.value(2), 6);
        assert_eq!(v.value(5), 11);
        assert_eq!(v.breakpoints().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn piecewise_is_cheap_at_large_quantities() {
        let v = MarginalPiecewise::new(vec![(1, 2), (1 << 20, 1)]).unwrap();
        let q = 1u64 << 40;
        let expected = 2 * ((1u64 << 20) - 1) + (q - (1 << 20) + 1);
        assert_eq!(v.value(q), expected);
    }

    #[test]
    fn piecewise_rejects_bad_tuples() {
        assert_eq!(
            MarginalPiecewise::new(vec![(2, 3)]),
            Err(ValuationError::FirstBreakpointNotOne(2))
        );
        assert_eq!(
            MarginalPiecewise::new(vec![(1, 3), (4, 1), (4, 2)]),
            Err(ValuationError::BreakpointsNotIncreasing { index: 2 })
        );
        assert_eq!(
            MarginalPiecewise::new(vec![]),
            Err(ValuationError::NoTuples)
        );
    }

    #[test]
    fn table_checks() {
        assert_eq!(
            Table::new(vec![0, 2, 1]),
            Err(ValuationError::NonMonotone { index: 2 })
        );
        assert_eq!(
            Table::new(vec![1, 2]),
            Err(ValuationError::NotNormalized(1))
        );
        assert_eq!(Table::new(vec![]), Err(ValuationError::EmptyTable));
        let t = Table::new(vec![0, 1, 3]).unwrap();
        assert_eq!(t.value(2), 3);
        assert_eq!(t.value(99), 3);
    }

    #[test]
    fn subadditivity_examples() {
        let additive: Valuation = Table::new((0..=10).collect()).unwrap().into();
        assert!(is_subadditive(&additive, 10));
        let v = one_point(5, 1);
        assert!(!is_subadditive(&v, 10));
        assert!(is_subadditive(&subadditive_closure(&v, 10), 10));
    }

    #[test]
    fn closure_examples() {
        let v = one_point(5, 1);
        let c = subadditive_closure(&v, 10);
        assert_eq!(c.value(0), 0);
        assert_eq!(c.value(3), 1);
        assert_eq!(c.value(10), 2);
    }

    #[test]
    fn query_counter_counts_distinct_quantities() {
        let v = one_point(3, 4);
        let counted = QueryCounted::new(&v);
        for q in [1, 3, 3, 7, 1] {
            assert_eq!(counted.value(q), v.value(q));
        }
        assert_eq!(counted.distinct_queries(), 3);
        counted.reset();
        assert_eq!(counted.distinct_queries(), 0);
        assert!(counted.valuation().is_some());
    }

    fn arb_k_minded(m: Quantity) -> impl Strategy<Value = Valuation> {
        prop::collection::btree_map(1..=m, 0..50u64, 0..5)
            .prop_map(|bids| KMinded::new(bids.into_iter().collect()).unwrap().into())
    }

    fn arb_piecewise(m: Quantity) -> impl Strategy<Value = Valuation> {
        (
            0..20u64,
            prop::collection::btree_map(2..=m.max(2), 0..20u64, 0..5),
        )
            .prop_map(|(first, rest)| {
                let mut tuples = vec![(1, first)];
                tuples.extend(rest);
                MarginalPiecewise::new(tuples).unwrap().into()
            })
    }

    fn arb_table(m: Quantity) -> impl Strategy<Value = Valuation> {
        prop::collection::vec(0..10u64, m as usize).prop_map(|steps| {
            let mut values = vec![0];
            for s in steps {
                values.push(values.last().unwrap() + s);
            }
            Table::new(values).unwrap().into()
        })
    }

    fn arb_valuation(m: Quantity) -> impl Strategy<Value = Valuation> {
        prop_oneof![arb_k_minded(m), arb_piecewise(m), arb_table(m)]
    }

    proptest! {
        #[test]
        fn every_kind_is_normalized_and_monotone(v in arb_valuation(30)) {
            prop_assert_eq!(v.value(0), 0);
            for q in 1..=30 {
                prop_assert!(v.value(q - 1) <= v.value(q));
            }
        }

        #[test]
        fn k_minded_is_step_function_with_at_most_k_steps(v in arb_k_minded(40)) {
            let k = v.as_k_minded().unwrap().bids().len();
            let steps = (1..=40).filter(|&q| v.value(q) != v.value(q - 1)).count();
            prop_assert!(steps <= k);
        }

        #[test]
        fn single_minded_shape(q in 1..30u64, p in 0..100u64) {
            let v = one_point(q, p);
            for x in 0..40 {
                prop_assert_eq!(v.value(x), if x >= q { p } else { 0 });
            }
        }

        #[test]
        fn piecewise_closed_form_matches_item_sum(v in arb_piecewise(10_000)) {
            let pw = v.as_piecewise().unwrap();
            let tuples = pw.tuples();
            let mut running = 0u64;
            let mut piece = 0;
            for item in 1..=10_000u64 {
                while piece + 1 < tuples.len() && tuples[piece + 1].0 <= item {
                    piece += 1;
                }
                running += tuples[piece].1;
                prop_assert_eq!(pw.value(item), running);
            }
        }

        #[test]
        fn closure_is_subadditive(v in arb_valuation(16)) {
            let c = subadditive_closure(&v, 16);
            prop_assert_eq!(c.kind(), v.kind());
            prop_assert!(is_subadditive(&c, 16));
            for q in 1..=16 {
                prop_assert_eq!(c.value(q), v.value(q) + v.value(16));
            }
        }

        #[test]
        fn counted_is_observationally_equivalent(v in arb_valuation(25), qs in prop::collection::vec(0..40u64, 0..30)) {
            let counted = QueryCounted::new(&v);
            for &q in &qs {
                prop_assert_eq!(counted.value(q), v.value(q));
            }
            let distinct: BTreeSet<_> = qs.iter().copied().collect();
            prop_assert_eq!(counted.distinct_queries(), distinct.len());
        }
    }
}
