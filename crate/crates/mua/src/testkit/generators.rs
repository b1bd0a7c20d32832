use std::fmt;
use std::str::FromStr;

use mua_core::valuation::{is_subadditive, subadditive_closure};
use mua_core::{Instance, KMinded, MarginalPiecewise, Quantity, Table, Valuation, Value};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Bidder `i` values any `s[i]` or more items at 1. A zero target becomes a
/// bid for one item, keeping `v(0) = 0`.
pub fn gen_onepoint(s: &[Quantity], m: Quantity) -> Result<Instance> {
    let total: u128 = s.iter().map(|&q| u128::from(q)).sum();
    if total > u128::from(m) {
        return Err(mua_core::Error::Oversubscribed { total, supply: m }.into());
    }
    let bidders = s
        .iter()
        .map(|&q| {
            KMinded::new(vec![(q.max(1), 1)])
                .expect("one positive quantity")
                .into()
        })
        .collect();
    Ok(Instance::new(m, bidders)?)
}

/// Two subadditive bidders: bidder 1 values any item at 1 and `s1` items at
/// 2, bidder 2 likewise with `m - s1`. Only the split `(s1, m - s1)` reaches
/// welfare 4.
pub fn gen_subadditive_hard(m: Quantity, s1: Quantity) -> Result<Instance> {
    if s1 == 0 || s1 >= m {
        return Err(Error::InvalidArgument(format!(
            "s1 = {s1} must lie in 1..{m}"
        )));
    }
    let bidder = |s: Quantity| -> Valuation {
        let bids = if s == 1 {
            vec![(1, 2)]
        } else {
            vec![(1, 1), (s, 2)]
        };
        KMinded::new(bids).expect("distinct quantities").into()
    };
    Ok(Instance::new(m, vec![bidder(s1), bidder(m - s1)])?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    KMinded,
    MarginalPiecewise,
    Table,
    /// Random table passed through the subadditive closure.
    SubadditiveTable,
    /// Each bidder draws one of the first three kinds.
    Mixed,
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "k_minded" => Self::KMinded,
            "marginal_piecewise" => Self::MarginalPiecewise,
            "table" => Self::Table,
            "subadditive_table" => Self::SubadditiveTable,
            "mixed" => Self::Mixed,
            _ => {
                return Err(format!(
                    "unknown kind `{s}` (expected k_minded, marginal_piecewise, table, subadditive_table or mixed)"
                ))
            }
        })
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::KMinded => "k_minded",
            Self::MarginalPiecewise => "marginal_piecewise",
            Self::Table => "table",
            Self::SubadditiveTable => "subadditive_table",
            Self::Mixed => "mixed",
        })
    }
}

/// A random valuation over `0..=m`.
///
/// k-minded: `min(k, m)` distinct quantities with prices in `0..=value_cap`.
/// Piecewise: `min(k, m)` tuples with marginals up to `value_cap / m`, so
/// `v(m) <= value_cap`. Tables: sorted uniform draws. Subadditive tables: the
/// closure of a table drawn with half the cap.
pub fn random_valuation<R: Rng>(
    kind: GenKind,
    m: Quantity,
    k: usize,
    value_cap: Value,
    rng: &mut R,
) -> Valuation {
    let k = (k.max(1) as u64).min(m) as usize;
    match kind {
        GenKind::KMinded => {
            let mut qs: Vec<Quantity> = sample(rng, m as usize, k)
                .into_iter()
                .map(|q| q as Quantity + 1)
                .collect();
            qs.sort_unstable();
            let bids = qs
                .into_iter()
                .map(|q| (q, rng.gen_range(0..=value_cap)))
                .collect();
            KMinded::new(bids)
                .expect("distinct positive quantities")
                .into()
        }
        GenKind::MarginalPiecewise => {
            let per_item = (value_cap / m).max(1);
            let mut starts = vec![1];
            if m > 1 {
                let mut rest: Vec<Quantity> = sample(rng, (m - 1) as usize, k - 1)
                    .into_iter()
                    .map(|u| u as Quantity + 2)
                    .collect();
                rest.sort_unstable();
                starts.extend(rest);
            }
            let tuples = starts
                .into_iter()
                .map(|u| (u, rng.gen_range(0..=per_item)))
                .collect();
            MarginalPiecewise::new(tuples)
                .expect("increasing breakpoints from 1")
                .into()
        }
        GenKind::Table => random_table(m, value_cap, rng),
        GenKind::SubadditiveTable => {
            let closed = subadditive_closure(&random_table(m, value_cap / 2, rng), m);
            debug_assert!(is_subadditive(&closed, m));
            closed
        }
        GenKind::Mixed => {
            let kind =
                [GenKind::KMinded, GenKind::MarginalPiecewise, GenKind::Table][rng.gen_range(0..3)];
            random_valuation(kind, m, k, value_cap, rng)
        }
    }
}

fn random_table<R: Rng>(m: Quantity, value_cap: Value, rng: &mut R) -> Valuation {
    let mut values: Vec<Value> = (0..m).map(|_| rng.gen_range(0..=value_cap)).collect();
    values.sort_unstable();
    values.insert(0, 0);
    Table::new(values).expect("sorted and normalized").into()
}

/// Deterministic random instance: `n` bidders of `kind` over `m` items.
pub fn gen_random(
    kind: GenKind,
    n: usize,
    m: Quantity,
    k: usize,
    value_cap: Value,
    seed: u64,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bidders = (0..n)
        .map(|_| random_valuation(kind, m, k, value_cap, &mut rng))
        .collect();
    Ok(Instance::new(m, bidders)?)
}
