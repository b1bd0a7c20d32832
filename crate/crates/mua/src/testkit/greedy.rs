use mua_core::vcg::{run_with_payments, PaymentRule};
use mua_core::{
    Allocation, Bidder, Error, Instance, Mechanism, MechanismResult, Quantity, Value, Witness,
};

/// Awards bids by decreasing price per item, at most one per bidder, while
/// they fit. Ties go to the lower bidder index, then the smaller quantity.
pub fn greedy_allocation(m: Quantity, bidders: &[&dyn Bidder]) -> Result<Vec<Quantity>, Error> {
    let mut bids: Vec<(usize, Quantity, Value)> = Vec::new();
    for (i, b) in bidders.iter().enumerate() {
        let k = b
            .valuation()
            .and_then(|v| v.as_k_minded())
            .ok_or(Error::KindMismatch {
                bidder: i,
                expected: "k_minded",
            })?;
        bids.extend(
            k.bids()
                .iter()
                .filter(|&&(_, p)| p > 0)
                .map(|&(q, p)| (i, q, p)),
        );
    }
    bids.sort_by(|a, b| {
        let density = (u128::from(b.2) * u128::from(a.1)).cmp(&(u128::from(a.2) * u128::from(b.1)));
        density.then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1))
    });
    let mut shares = vec![0; bidders.len()];
    let mut left = m;
    for (i, q, _) in bids {
        if shares[i] == 0 && q <= left {
            shares[i] = q;
            left -= q;
        }
    }
    Ok(shares)
}

/// Density greedy as a [`Mechanism`]. It is not maximal-in-range, so VCG
/// payments on top of it can reward lying.
#[derive(Debug, Clone, Copy, Default)]
pub struct Greedy;

impl Mechanism for Greedy {
    fn id(&self) -> &'static str {
        "greedy"
    }

    fn run(&self, m: Quantity, bidders: &[&dyn Bidder]) -> Result<MechanismResult, Error> {
        let shares = greedy_allocation(m, bidders)?;
        let welfare = bidders
            .iter()
            .zip(&shares)
            .filter(|(_, &s)| s > 0)
            .map(|(b, &s)| b.value(s))
            .sum();
        Ok(MechanismResult {
            allocation: Allocation::new(shares),
            welfare,
            payments: None,
            witness: Witness::None,
        })
    }
}

pub fn baseline_greedy_vcg(instance: &Instance) -> Result<MechanismResult, Error> {
    run_with_payments(instance, &Greedy, PaymentRule::Clarke)
}
