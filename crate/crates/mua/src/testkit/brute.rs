use mua_core::combinatorics::{composition_count, for_each_composition};
use mua_core::{
    Allocation, Bidder, Error, Instance, Mechanism, MechanismResult, Quantity, Ratio, Value,
    Witness,
};

pub const BRUTE_MAX_SUPPLY: Quantity = 64;
pub const BRUTE_MAX_ALLOCATIONS: u64 = 2_000_000;

/// Exact optimum by enumerating every allocation; the lexicographically
/// smallest optimum wins.
pub fn brute_force_opt(instance: &Instance) -> Result<(Allocation, Value), Error> {
    let r = Brute.solve(instance)?;
    Ok((r.allocation, r.welfare))
}

/// Exhaustive search as a [`Mechanism`]; refuses instances above
/// [`BRUTE_MAX_SUPPLY`] items or [`BRUTE_MAX_ALLOCATIONS`] allocations.
#[derive(Debug, Clone, Copy, Default)]
pub struct Brute;

impl Mechanism for Brute {
    fn id(&self) -> &'static str {
        "brute"
    }

    fn run(&self, m: Quantity, bidders: &[&dyn Bidder]) -> Result<MechanismResult, Error> {
        let n = bidders.len();
        if m > BRUTE_MAX_SUPPLY {
            return Err(Error::TooLarge {
                what: "brute force supply",
            });
        }
        if composition_count(n, m).is_none_or(|c| c > BRUTE_MAX_ALLOCATIONS) {
            return Err(Error::TooLarge {
                what: "brute force allocation count",
            });
        }
        let tables: Vec<Vec<Value>> = bidders
            .iter()
            .map(|b| {
                (0..=m)
                    .map(|q| if q == 0 { 0 } else { b.value(q) })
                    .collect()
            })
            .collect();
        let mut best: Option<(Value, Vec<Quantity>)> = None;
        for_each_composition(n, m, |shares| {
            let w: Value = tables.iter().zip(shares).map(|(t, &s)| t[s as usize]).sum();
            if best.as_ref().is_none_or(|b| w > b.0) {
                best = Some((w, shares.to_vec()));
            }
        });
        let (welfare, shares) = best.expect("the empty allocation is always enumerated");
        Ok(MechanismResult {
            allocation: Allocation::new(shares),
            welfare,
            payments: None,
            witness: Witness::Full,
        })
    }

    fn range(&self, m: Quantity, n: usize) -> Option<Vec<Allocation>> {
        let mut out = Vec::new();
        for_each_composition(n, m, |c| out.push(Allocation::new(c.to_vec())));
        Some(out)
    }

    fn guarantee(&self, _n: usize) -> Option<Ratio> {
        Some(Ratio::ONE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::gen_onepoint;
    use mua_core::{KMinded, Valuation};

    fn one_point(q: Quantity, p: Value) -> Valuation {
        KMinded::new(vec![(q, p)]).unwrap().into()
    }

    #[test]
    fn examples() {
        let zeros = Instance::new(5, vec![KMinded::zero().into(), KMinded::zero().into()]).unwrap();
        assert_eq!(
            brute_force_opt(&zeros).unwrap(),
            (Allocation::new(vec![0, 0]), 0)
        );

        assert_eq!(
            brute_force_opt(&gen_onepoint(&[30, 70], 100).unwrap()),
            Err(Error::TooLarge {
                what: "brute force supply"
            })
        );
        let (a, w) = brute_force_opt(&gen_onepoint(&[3, 7], 10).unwrap()).unwrap();
        assert_eq!((a.to_vec(), w), (vec![3, 7], 2));

        let inst = Instance::new(8, vec![one_point(7, 10), one_point(1, 10)]).unwrap();
        let (a, w) = brute_force_opt(&inst).unwrap();
        assert_eq!((a.to_vec(), w), (vec![7, 1], 20));
    }

    #[test]
    fn allocation_guard() {
        let inst = Instance::new(60, vec![one_point(1, 1); 6]).unwrap();
        assert_eq!(
            brute_force_opt(&inst),
            Err(Error::TooLarge {
                what: "brute force allocation count"
            })
        );
    }
}
