//! Optimal split of equal-size bundles among bidders.

use alloc::vec;
use alloc::vec::Vec;

use crate::valuation::Bidder;
use crate::{Quantity, Value};

/// Each bidder's value for `0..=qmax` bundles of `bundle` items.
pub(crate) fn bundle_values(
    b: &dyn Bidder,
    bundle: Quantity,
    qmax: u64,
    offset: Quantity,
) -> Vec<Value> {
    (0..=qmax)
        .map(|c| {
            let q = c * bundle + offset;
            if q == 0 {
                0
            } else {
                b.value(q)
            }
        })
        .collect()
}

/// Maximizes `sum_i v_i(c_i * bundle)` subject to `sum_i c_i <= qmax`.
///
/// Fills `M(i, q)`, the best value of at most `q` bundles among the first `i`
/// bidders, via `M(i, q) = max_{c <= q} v_i(c * bundle) + M(i - 1, q - c)`.
/// Backtracking takes the smallest optimal count for each bidder from the last
/// down, and gives the first bidder every bundle still left.
pub fn dp_equal_bundles(
    bidders: &[&dyn Bidder],
    bundle: Quantity,
    qmax: u64,
) -> (Vec<Quantity>, Value) {
    assert!(bundle >= 1, "bundle size must be positive");
    let values: Vec<Vec<Value>> = bidders
        .iter()
        .map(|b| bundle_values(*b, bundle, qmax, 0))
        .collect();
    solve_tables(&values, qmax)
}

/// Same recurrence over precomputed `values[i][c]`.
pub(crate) fn solve_tables(values: &[Vec<Value>], qmax: u64) -> (Vec<Quantity>, Value) {
    let width = qmax as usize + 1;
    let n = values.len();
    let mut table = vec![vec![0 as Value; width]; n + 1];
    for i in 1..=n {
        for q in 0..width {
            table[i][q] = (0..=q)
                .map(|c| values[i - 1][c] + table[i - 1][q - c])
                .max()
                .unwrap_or(0);
        }
    }
    let mut counts = vec![0; n];
    let mut q = width - 1;
    for i in (1..=n).rev() {
        let fits = |&c: &usize| values[i - 1][c] + table[i - 1][q - c] == table[i][q];
        let c = if i == 1 {
            (0..=q).rev().find(fits)
        } else {
            (0..=q).find(fits)
        }
        .expect("optimal count exists");
        counts[i - 1] = c as Quantity;
        q -= c;
    }
    (counts, table[n][width - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::for_each_composition;
    use crate::{KMinded, Valuation};
    use proptest::prelude::*;

    fn one_point(q: Quantity, p: Value) -> Valuation {
        KMinded::new(vec![(q, p)]).unwrap().into()
    }

    #[test]
    fn single_bidder_takes_everything() {
        let v = one_point(3, 7);
        let (counts, value) = dp_equal_bundles(&[&v], 2, 5);
        assert_eq!(counts, vec![5]);
        assert_eq!(value, 7);
    }

    #[test]
    fn two_bidder_example() {
        let a = one_point(4, 5);
        let b = one_point(2, 4);
        let (counts, value) = dp_equal_bundles(&[&a, &b], 2, 3);
        assert_eq!(counts, vec![2, 1]);
        assert_eq!(value, 9);
    }

    #[test]
    fn no_bundles() {
        let a = one_point(1, 5);
        let b = one_point(1, 4);
        assert_eq!(dp_equal_bundles(&[&a, &b], 3, 0), (vec![0, 0], 0));
    }

    fn brute(bidders: &[&dyn Bidder], bundle: Quantity, qmax: u64) -> Value {
        let mut best = 0;
        for_each_composition(bidders.len(), qmax, |c| {
            let v = bidders
                .iter()
                .zip(c)
                .map(|(b, &c)| b.value(c * bundle))
                .sum::<Value>();
            best = best.max(v);
        });
        best
    }

    proptest! {
        #[test]
        fn matches_exhaustive_split(
            bids in prop::collection::vec(prop::collection::btree_map(1..15u64, 0..20u64, 0..3), 1..=3),
            bundle in 1..4u64,
            qmax in 0..=6u64,
        ) {
            let vals: Vec<Valuation> = bids
                .into_iter()
                .map(|b| KMinded::new(b.into_iter().collect()).unwrap().into())
                .collect();
            let refs: Vec<&dyn Bidder> = vals.iter().map(|v| v as &dyn Bidder).collect();
            let (counts, value) = dp_equal_bundles(&refs, bundle, qmax);
            prop_assert!(counts.iter().sum::<u64>() <= qmax);
            let realized: Value = refs.iter().zip(&counts).map(|(b, &c)| b.value(c * bundle)).sum();
            prop_assert_eq!(realized, value);
            prop_assert_eq!(value, brute(&refs, bundle, qmax));
        }
    }
}
