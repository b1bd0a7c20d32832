//! VCG payments for maximal-in-range allocation rules.
//!
//! Bidder `i` pays `h_i - sum_{j != i} v_j(a)`. Under the Clarke pivot `h_i` is
//! the welfare the same mechanism reaches when `i` reports the zero valuation.
//! Zeroing keeps `n` and `m`, so the range does not move and each bidder's
//! utility is the output welfare minus a term it cannot influence.

use alloc::vec::Vec;

use crate::{Error, Instance, Mechanism, MechanismResult, Quantity, Value};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PaymentRule {
    /// `h_i` = welfare of the others' best outcome with `i` zeroed.
    #[default]
    Clarke,
    /// `h_i = 0`: every bidder is paid the others' welfare.
    ZeroPivot,
}

fn others_value(instance: &Instance, allocation: &[Quantity], i: usize) -> Value {
    instance
        .bidders()
        .iter()
        .zip(allocation)
        .enumerate()
        .filter(|&(j, (_, &s))| j != i && s > 0)
        .map(|(_, (v, &s))| v.value(s))
        .sum()
}

/// Payments for `allocation`, the mechanism's output on `instance`.
pub fn payments_for(
    instance: &Instance,
    mechanism: &dyn Mechanism,
    allocation: &[Quantity],
    rule: PaymentRule,
) -> Result<Vec<i64>, Error> {
    (0..instance.n())
        .map(|i| {
            let pivot = match rule {
                PaymentRule::Clarke => mechanism.solve(&instance.with_zeroed(i)?)?.welfare,
                PaymentRule::ZeroPivot => 0,
            };
            // Instance::new keeps every welfare within i64.
            Ok(pivot as i64 - others_value(instance, allocation, i) as i64)
        })
        .collect()
}

pub fn compute_payments(
    instance: &Instance,
    mechanism: &dyn Mechanism,
    rule: PaymentRule,
) -> Result<Vec<i64>, Error> {
    let result = mechanism.solve(instance)?;
    payments_for(instance, mechanism, &result.allocation, rule)
}

/// Runs the mechanism once and attaches payments to its result.
pub fn run_with_payments(
    instance: &Instance,
    mechanism: &dyn Mechanism,
    rule: PaymentRule,
) -> Result<MechanismResult, Error> {
    let mut result = mechanism.solve(instance)?;
    result.payments = Some(payments_for(instance, mechanism, &result.allocation, rule)?);
    Ok(result)
}

/// Quasilinear utility `v_i(s_i) - p_i`.
pub fn utility(instance: &Instance, i: usize, result: &MechanismResult) -> Result<i64, Error> {
    let payments = result.payments.as_ref().ok_or(Error::MissingPayments)?;
    let n = instance.n();
    let (&share, &payment) =
        result
            .allocation
            .get(i)
            .zip(payments.get(i))
            .ok_or(Error::BidderOutOfRange {
                bidder: i,
                bidders: n,
            })?;
    let value = if share == 0 {
        0
    } else {
        instance.bidders()[i].value(share)
    };
    Ok(value as i64 - payment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::half::Half;
    use crate::lift::{ExhaustiveKMinded, Lift, SingleBidder};
    use crate::ptas::Ptas;
    use crate::{KMinded, Table, Valuation, Witness};
    use proptest::prelude::*;

    fn one_point(q: Quantity, p: Value) -> Valuation {
        KMinded::new(vec![(q, p)]).unwrap().into()
    }

    fn additive(m: Quantity) -> Valuation {
        Table::new((0..=m).collect()).unwrap().into()
    }

    #[test]
    fn single_bidder_pays_nothing() {
        let inst = Instance::new(6, vec![one_point(4, 9)]).unwrap();
        for mech in [
            &Half as &dyn Mechanism,
            &Ptas::new(1),
            &Lift::new(SingleBidder, 1),
        ] {
            let r = run_with_payments(&inst, mech, PaymentRule::Clarke).unwrap();
            assert_eq!(r.payments, Some(vec![0]));
            assert_eq!(utility(&inst, 0, &r), Ok(9));
        }
    }

    #[test]
    fn additive_pair_pays_its_share() {
        let inst = Instance::new(8, vec![additive(8), additive(8)]).unwrap();
        let r = run_with_payments(&inst, &Half, PaymentRule::Clarke).unwrap();
        let shares: Vec<i64> = r.allocation.iter().map(|&s| s as i64).collect();
        assert_eq!(r.payments, Some(shares));
        for i in 0..2 {
            assert_eq!(utility(&inst, i, &r), Ok(0));
        }
    }

    #[test]
    fn onepoint_winner_pays_threshold() {
        let inst = Instance::new(100, vec![one_point(30, 1), one_point(70, 1)]).unwrap();
        let r = run_with_payments(&inst, &Half, PaymentRule::Clarke).unwrap();
        let payments = r.payments.clone().unwrap();
        let winner = (0..2)
            .find(|&i| r.allocation[i] > 0 && inst.bidders()[i].value(r.allocation[i]) > 0)
            .unwrap();
        assert_eq!(payments[winner], 1);
        assert_eq!(payments[1 - winner], 0);
    }

    #[test]
    fn zero_pivot_pays_out() {
        let inst = Instance::new(8, vec![additive(8), additive(8)]).unwrap();
        let p = compute_payments(&inst, &Half, PaymentRule::ZeroPivot).unwrap();
        let r = Half.solve(&inst).unwrap();
        assert_eq!(
            p,
            vec![-(r.allocation[1] as i64), -(r.allocation[0] as i64)]
        );
    }

    #[test]
    fn zero_bidder_has_zero_utility() {
        let inst = Instance::new(5, vec![KMinded::zero().into(), one_point(2, 3)]).unwrap();
        let r = run_with_payments(&inst, &Ptas::new(1), PaymentRule::Clarke).unwrap();
        assert_eq!(utility(&inst, 0, &r), Ok(0));
    }

    #[test]
    fn missing_payments() {
        let inst = Instance::new(5, vec![one_point(2, 3)]).unwrap();
        let r = Half.solve(&inst).unwrap();
        assert_eq!(utility(&inst, 0, &r), Err(Error::MissingPayments));
    }

    fn witness_shape(w: &Witness) -> (Quantity, Quantity, Quantity) {
        match w {
            Witness::Bundles {
                bundle_size,
                bundle_count,
                remainder,
                ..
            } => (*bundle_size, *bundle_count, *remainder),
            _ => unreachable!(),
        }
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1..=10u64, 1..=3usize).prop_flat_map(|(m, n)| {
            prop::collection::vec(prop::collection::btree_map(1..=m, 0..9u64, 0..=2), n).prop_map(
                move |bids| {
                    let vals = bids
                        .into_iter()
                        .map(|b| KMinded::new(b.into_iter().collect()).unwrap().into())
                        .collect();
                    Instance::new(m, vals).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn clarke_is_rational_without_transfers(inst in arb_instance(), t in 0..=2usize) {
            let ptas = Ptas::new(t);
            let lift = Lift::new(ExhaustiveKMinded::default(), t);
            for mech in [&Half as &dyn Mechanism, &ptas, &lift] {
                let r = run_with_payments(&inst, mech, PaymentRule::Clarke).unwrap();
                for i in 0..inst.n() {
                    prop_assert!(r.payments.as_ref().unwrap()[i] >= 0);
                    prop_assert!(utility(&inst, i, &r).unwrap() >= 0);
                }
            }
        }

        #[test]
        fn zeroing_keeps_range_parameters(inst in arb_instance()) {
            let shape = witness_shape(&Half.solve(&inst).unwrap().witness);
            for i in 0..inst.n() {
                let zeroed = inst.with_zeroed(i).unwrap();
                prop_assert_eq!(zeroed.n(), inst.n());
                prop_assert_eq!(witness_shape(&Half.solve(&zeroed).unwrap().witness), shape);
            }
        }
    }
}
