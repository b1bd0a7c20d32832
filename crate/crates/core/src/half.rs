//! Half-approximation for black-box valuations.
//!
//! The items are cut into `n^2` regular bundles of `b = floor(m / n^2)` items
//! plus one remainder bundle of `r = m - n^2 b` items, and the bundles are
//! allocated optimally. Two tables drive the search: `M(i, q)` for at most `q`
//! regular bundles among the first `i` bidders, and `M+(i, q)` for the same
//! with the remainder bundle also available to them. Only value queries at
//! `c b` and `c b + r` are issued, so the query count does not depend on `m`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::bundles::{bundle_values, solve_tables};
use crate::combinatorics::for_each_composition;
use crate::model::sum_values;
use crate::valuation::Bidder;
use crate::{Allocation, Error, Mechanism, MechanismResult, Quantity, Ratio, Value, Witness};

/// How the supply is cut: `count` bundles of `bundle_size` plus `remainder`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundleScheme {
    pub bundle_size: Quantity,
    pub count: u64,
    pub remainder: Quantity,
}

impl BundleScheme {
    /// `n^2` bundles of `floor(m / n^2)`; when `m < n^2` every item is its own
    /// bundle and there is no remainder.
    pub fn for_supply(m: Quantity, n: usize) -> Self {
        let squares = (n as u64).saturating_mul(n as u64);
        if m < squares {
            return Self {
                bundle_size: 1,
                count: m,
                remainder: 0,
            };
        }
        let bundle_size = m / squares;
        Self {
            bundle_size,
            count: squares,
            remainder: m - squares * bundle_size,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Half;

pub fn solve_half(m: Quantity, bidders: &[&dyn Bidder]) -> Result<MechanismResult, Error> {
    let n = bidders.len();
    let scheme = BundleScheme::for_supply(m, n);
    let BundleScheme {
        bundle_size: b,
        count,
        remainder: r,
    } = scheme;
    let regular: Vec<Vec<Value>> = bidders
        .iter()
        .map(|v| bundle_values(*v, b, count, 0))
        .collect();

    let (counts, holder) = if r == 0 {
        (solve_tables(&regular, count).0, None)
    } else {
        let with_rest: Vec<Vec<Value>> = bidders
            .iter()
            .map(|v| bundle_values(*v, b, count, r))
            .collect();
        best_with_remainder(&regular, &with_rest, count)
    };

    let shares: Vec<Quantity> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| c * b + if holder == Some(i) { r } else { 0 })
        .collect();
    let welfare = sum_values(bidders, &shares);
    Ok(MechanismResult {
        allocation: Allocation::new(shares),
        welfare,
        payments: None,
        witness: Witness::Bundles {
            bundle_size: b,
            bundle_count: count,
            remainder: r,
            remainder_holder: holder,
            bundle_counts: counts,
        },
    })
}

/// Fills `M` and `M+` and backtracks. `M+(0, q) = 0`, so the remainder may stay
/// unassigned. Later bidders take as few bundles as possible and leave the
/// remainder to earlier ones; the first bidder takes everything still optimal.
fn best_with_remainder(
    regular: &[Vec<Value>],
    with_rest: &[Vec<Value>],
    qmax: u64,
) -> (Vec<Quantity>, Option<usize>) {
    let n = regular.len();
    let width = qmax as usize + 1;
    let mut plain = vec![vec![0 as Value; width]; n + 1];
    let mut plus = vec![vec![0 as Value; width]; n + 1];
    for i in 1..=n {
        for q in 0..width {
            let mut best_plain = 0;
            let mut best_plus = 0;
            for c in 0..=q {
                best_plain = best_plain.max(regular[i - 1][c] + plain[i - 1][q - c]);
                best_plus = best_plus
                    .max(regular[i - 1][c] + plus[i - 1][q - c])
                    .max(with_rest[i - 1][c] + plain[i - 1][q - c]);
            }
            plain[i][q] = best_plain;
            plus[i][q] = best_plus;
        }
    }

    let mut counts = vec![0; n];
    let mut holder = None;
    let mut q = width - 1;
    for i in (1..=n).rev() {
        // The first bidder takes whatever is left; later ones as little as possible.
        let order: Vec<usize> = if i == 1 {
            (0..=q).rev().collect()
        } else {
            (0..=q).collect()
        };
        let c = if holder.is_none() {
            let target = plus[i][q];
            let takes_rest = |c: usize| with_rest[i - 1][c] + plain[i - 1][q - c] == target;
            let keeps_rest = |c: usize| regular[i - 1][c] + plus[i - 1][q - c] == target;
            let c = order
                .iter()
                .copied()
                .find(|&c| takes_rest(c) || keeps_rest(c))
                .expect("optimal branch exists");
            if takes_rest(c) && (i == 1 || !keeps_rest(c)) {
                holder = Some(i - 1);
            }
            c
        } else {
            *order
                .iter()
                .find(|&&c| regular[i - 1][c] + plain[i - 1][q - c] == plain[i][q])
                .expect("optimal count exists")
        };
        counts[i - 1] = c as Quantity;
        q -= c;
    }
    (counts, holder)
}

/// Every allocation of whole regular bundles plus at most one remainder bundle.
pub fn enumerate_bundle_range(m: Quantity, n: usize) -> Vec<Allocation> {
    let BundleScheme {
        bundle_size: b,
        count,
        remainder: r,
    } = BundleScheme::for_supply(m, n);
    let mut out = BTreeSet::new();
    for_each_composition(n, count, |counts| {
        let base: Vec<Quantity> = counts.iter().map(|&c| c * b).collect();
        out.insert(Allocation::new(base.clone()));
        if r > 0 {
            for i in 0..n {
                let mut with = base.clone();
                with[i] += r;
                out.insert(Allocation::new(with));
            }
        }
    });
    out.into_iter().collect()
}

impl Mechanism for Half {
    fn id(&self) -> &'static str {
        "half"
    }

    fn run(&self, m: Quantity, bidders: &[&dyn Bidder]) -> Result<MechanismResult, Error> {
        solve_half(m, bidders)
    }

    fn range(&self, m: Quantity, n: usize) -> Option<Vec<Allocation>> {
        Some(enumerate_bundle_range(m, n))
    }

    fn guarantee(&self, _n: usize) -> Option<Ratio> {
        Some(Ratio::new(1, 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{welfare, Instance, KMinded, MarginalPiecewise, QueryCounted, Table, Valuation};
    use proptest::prelude::*;

    fn one_point(q: Quantity, p: Value) -> Valuation {
        KMinded::new(vec![(q, p)]).unwrap().into()
    }

    #[test]
    fn scheme_shapes() {
        assert_eq!(
            BundleScheme::for_supply(100, 2),
            BundleScheme {
                bundle_size: 25,
                count: 4,
                remainder: 0
            }
        );
        assert_eq!(
            BundleScheme::for_supply(11, 3),
            BundleScheme {
                bundle_size: 1,
                count: 9,
                remainder: 2
            }
        );
        assert_eq!(
            BundleScheme::for_supply(5, 3),
            BundleScheme {
                bundle_size: 1,
                count: 5,
                remainder: 0
            }
        );
        assert_eq!(
            BundleScheme::for_supply(7, 1),
            BundleScheme {
                bundle_size: 7,
                count: 1,
                remainder: 0
            }
        );
    }

    #[test]
    fn single_bidder() {
        let inst = Instance::new(13, vec![one_point(13, 4)]).unwrap();
        let r = Half.solve(&inst).unwrap();
        assert_eq!(r.allocation.to_vec(), vec![13]);
        assert_eq!(r.welfare, 4);
    }

    #[test]
    fn tight_pair() {
        let inst = Instance::new(8, vec![one_point(7, 10), one_point(1, 10)]).unwrap();
        let r = Half.solve(&inst).unwrap();
        assert_eq!(r.welfare, 10);
        assert!(matches!(
            r.witness,
            Witness::Bundles {
                bundle_size: 2,
                remainder: 0,
                ..
            }
        ));
    }

    #[test]
    fn onepoint_thirty_seventy() {
        let inst = Instance::new(100, vec![one_point(30, 1), one_point(70, 1)]).unwrap();
        assert_eq!(Half.solve(&inst).unwrap().welfare, 1);
    }

    #[test]
    fn remainder_goes_where_it_helps() {
        // m = 11, n = 2: four bundles of 2 plus a remainder of 3.
        let inst = Instance::new(11, vec![one_point(3, 5), one_point(8, 6)]).unwrap();
        let r = Half.solve(&inst).unwrap();
        assert_eq!(r.welfare, 11);
        assert_eq!(r.allocation.to_vec(), vec![3, 8]);
        assert!(matches!(
            r.witness,
            Witness::Bundles {
                remainder: 3,
                remainder_holder: Some(0),
                ..
            }
        ));
    }

    #[test]
    fn query_count_is_independent_of_supply() {
        let m = 1_000_000;
        let vals: Vec<Valuation> = vec![
            KMinded::new(vec![(400_000, 7), (130_001, 3)])
                .unwrap()
                .into(),
            MarginalPiecewise::new(vec![(1, 2), (5_000, 1)])
                .unwrap()
                .into(),
            one_point(999_999, 40),
            KMinded::new(vec![(1, 1)]).unwrap().into(),
        ];
        let counted: Vec<QueryCounted> = vals.iter().map(|v| QueryCounted::new(v)).collect();
        let refs: Vec<&dyn Bidder> = counted.iter().map(|c| c as &dyn Bidder).collect();
        solve_half(m, &refs).unwrap();
        let total: usize = counted.iter().map(QueryCounted::distinct_queries).sum();
        assert!(total <= 4 * (16 + 2), "{total} queries");
    }

    fn arb_valuation(m: Quantity) -> impl Strategy<Value = Valuation> {
        prop_oneof![
            prop::collection::btree_map(1..=m, 0..9u64, 0..=3).prop_map(|b| KMinded::new(
                b.into_iter().collect()
            )
            .unwrap()
            .into()),
            prop::collection::vec(0..4u64, m as usize).prop_map(|steps| {
                let mut values = vec![0];
                for s in steps {
                    values.push(values.last().unwrap() + s);
                }
                Table::new(values).unwrap().into()
            }),
        ]
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1..=12u64, 1..=3usize).prop_flat_map(|(m, n)| {
            prop::collection::vec(arb_valuation(m), n)
                .prop_map(move |vals| Instance::new(m, vals).unwrap())
        })
    }

    proptest! {
        #[test]
        fn maximal_over_bundle_range(inst in arb_instance()) {
            let r = Half.solve(&inst).unwrap();
            let range = enumerate_bundle_range(inst.m(), inst.n());
            prop_assert!(range.contains(&r.allocation));
            let best = range.iter().map(|a| welfare(&inst, a).unwrap()).max().unwrap();
            prop_assert_eq!(r.welfare, best);
        }

        #[test]
        fn range_shape(m in 1..40u64, n in 1..4usize) {
            let BundleScheme { bundle_size: b, remainder: r, .. } = BundleScheme::for_supply(m, n);
            for a in enumerate_bundle_range(m, n) {
                prop_assert!(a.total() <= u128::from(m));
                prop_assert!(a.iter().all(|&s| s % b == 0 || (s >= r && (s - r) % b == 0)));
                prop_assert!(a.iter().filter(|&&s| s % b != 0).count() <= 1);
            }
        }
    }
}
