//! Optimal `t`-round allocations for k-minded bidders.
//!
//! A set `T` of at most `t` bidders receives quantities taken from their own
//! bids; the remaining `m - l` items are cut into at most `(n - t)^2` equal
//! bundles that a dynamic program splits among everyone else. Trying every
//! `T` and every bid choice finds the best `t`-round allocation, whose welfare
//! is at least `t/(t+1)` of optimal. Running time is polynomial in `n`, `k`
//! and `log m` for fixed `t`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bundles::dp_equal_bundles;
use crate::combinatorics::{for_each_composition, subsets_up_to};
use crate::model::{round_divisor, sum_values};
use crate::valuation::Bidder;
use crate::{
    is_t_round, Allocation, Error, Mechanism, MechanismResult, Quantity, Ratio, Value, Witness,
};

/// Precision parameter; values above `n` behave like `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ptas {
    pub t: usize,
}

impl Ptas {
    pub fn new(t: usize) -> Self {
        Self { t }
    }
}

struct Candidate {
    welfare: Value,
    shares: Vec<Quantity>,
    witness: Witness,
}

pub fn solve_ptas(
    m: Quantity,
    bidders: &[&dyn Bidder],
    t: usize,
) -> Result<MechanismResult, Error> {
    let n = bidders.len();
    let t = t.min(n);

    // Quantities a member of T may receive: its positively priced bids that fit.
    let mut options: Vec<Vec<Quantity>> = vec![Vec::new(); n];
    if t > 0 {
        for (i, b) in bidders.iter().enumerate() {
            let k = b
                .valuation()
                .and_then(|v| v.as_k_minded())
                .ok_or(Error::KindMismatch {
                    bidder: i,
                    expected: "k_minded",
                })?;
            options[i] = k
                .bids()
                .iter()
                .filter(|&&(q, p)| p > 0 && q <= m)
                .map(|&(q, _)| q)
                .collect();
        }
    }

    let mut best: Option<Candidate> = None;
    for members in subsets_up_to(n, t) {
        let outside: Vec<usize> = (0..n).filter(|i| !members.contains(i)).collect();
        let outside_bidders: Vec<&dyn Bidder> = outside.iter().map(|&i| bidders[i]).collect();
        let d = round_divisor(n, t, members.len());
        let mut choice = vec![0; members.len()];
        for_each_choice(&members, &options, &mut choice, 0, &mut |picked| {
            let l: Quantity = picked.iter().sum();
            if l > m {
                return;
            }
            let mut shares = vec![0; n];
            let mut value: Value = 0;
            for (&i, &q) in members.iter().zip(picked) {
                shares[i] = q;
                value += bidders[i].value(q);
            }
            let (bundle_size, bundle_counts) = if outside.is_empty() {
                (1, vec![0; n])
            } else {
                let b = ((m - l) / d).max(1);
                let qmax = d.min((m - l) / b);
                let (counts, extra) = dp_equal_bundles(&outside_bidders, b, qmax);
                value += extra;
                let mut full = vec![0; n];
                for (&i, c) in outside.iter().zip(counts) {
                    full[i] = c;
                    shares[i] = c * b;
                }
                (b, full)
            };
            if best.as_ref().is_none_or(|c| value > c.welfare) {
                best = Some(Candidate {
                    welfare: value,
                    shares,
                    witness: Witness::TRound {
                        members: members.clone(),
                        level: l,
                        bundle_size,
                        bundle_counts,
                    },
                });
            }
        });
    }

    let best = best.expect("the empty set with no bundles is always a candidate");
    debug_assert_eq!(sum_values(bidders, &best.shares), best.welfare);
    Ok(MechanismResult {
        allocation: Allocation::new(best.shares),
        welfare: best.welfare,
        payments: None,
        witness: best.witness,
    })
}

fn for_each_choice(
    members: &[usize],
    options: &[Vec<Quantity>],
    picked: &mut Vec<Quantity>,
    depth: usize,
    f: &mut impl FnMut(&[Quantity]),
) {
    if depth == members.len() {
        f(picked);
        return;
    }
    for &q in &options[members[depth]] {
        picked[depth] = q;
        for_each_choice(members, options, picked, depth + 1, f);
    }
}

/// Every `t`-round allocation of `m` items among `n` bidders. Exponential;
/// test scale only.
pub fn enumerate_t_round_range(m: Quantity, n: usize, t: usize) -> Vec<Allocation> {
    let mut out = Vec::new();
    for_each_composition(n, m, |shares| {
        if is_t_round(m, n, shares, t) {
            out.push(Allocation::new(shares.to_vec()));
        }
    });
    out
}

impl Mechanism for Ptas {
    fn id(&self) -> &'static str {
        "ptas"
    }

    fn run(&self, m: Quantity, bidders: &[&dyn Bidder]) -> Result<MechanismResult, Error> {
        solve_ptas(m, bidders, self.t)
    }

    fn range(&self, m: Quantity, n: usize) -> Option<Vec<Allocation>> {
        Some(enumerate_t_round_range(m, n, self.t.min(n)))
    }

    fn guarantee(&self, n: usize) -> Option<Ratio> {
        let t = self.t.min(n);
        Some(if t >= n {
            Ratio::ONE
        } else {
            Ratio::new(t as u64, t as u64 + 1)
        })
    }
}
