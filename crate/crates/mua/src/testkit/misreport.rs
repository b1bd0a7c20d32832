//! Random search for profitable lies.
//!
//! Each sample replaces one bidder's report by a perturbation of its true
//! valuation, of the same kind, and reruns the mechanism with payments. The
//! perturbations aim at the places where maximal-in-range rules jump:
//!
//! * the zero valuation;
//! * all prices, marginals or entries scaled by a factor from 0 to 100;
//! * a bid quantity or breakpoint moved by one item or onto a range
//!   breakpoint (bundle multiples, lift levels, power-grid points);
//! * a bid or tuple removed, or a new one added, possibly at a breakpoint;
//! * a single price or marginal redrawn;
//! * a fresh valuation of the same kind.

use std::collections::{BTreeMap, BTreeSet};

use mua_core::half::BundleScheme;
use mua_core::lift::{build_l_grid, lift_bundles, SubadditiveGrid};
use mua_core::vcg::{run_with_payments, utility, PaymentRule};
use mua_core::{
    Bidder, Instance, KMinded, MarginalPiecewise, Mechanism, MechanismResult, Quantity, Table,
    Valuation, Value, VALUE_CAP,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generators::{random_valuation, GenKind};
use crate::format::ValuationRecord;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MisreportReport {
    pub bidder: usize,
    pub truthful_utility: i64,
    /// Largest utility change over truth among the samples; positive means a
    /// profitable lie was found.
    pub best_gain: i64,
    /// The first report reaching `best_gain`, when that gain is positive.
    pub witness: Option<ValuationRecord>,
    pub samples: usize,
    /// Runs, truthful one included, where some bidder paid a negative amount
    /// or ended with negative utility by its own report. Counted under the
    /// Clarke rule only.
    pub ir_violations: usize,
}

/// `v(s_i) - p_i` with `v` the bidder's true valuation.
pub fn true_utility(truth: &dyn Bidder, result: &MechanismResult, bidder: usize) -> Result<i64> {
    let payments = result
        .payments
        .as_ref()
        .ok_or(mua_core::Error::MissingPayments)?;
    let share = result.allocation[bidder];
    let value = if share == 0 { 0 } else { truth.value(share) };
    Ok(value as i64 - payments[bidder])
}

pub fn misreport_search(
    mechanism: &dyn Mechanism,
    rule: PaymentRule,
    instance: &Instance,
    bidder: usize,
    samples: usize,
    seed: u64,
) -> Result<MisreportReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if bidder >= instance.n() {
        return Err(mua_core::Error::BidderOutOfRange {
            bidder,
            bidders: instance.n(),
        }
        .into());
    }
    let truth = &instance.bidders()[bidder];
    let irrational = |inst: &Instance, r: &MechanismResult| -> Result<bool> {
        if rule != PaymentRule::Clarke {
            return Ok(false);
        }
        for i in 0..inst.n() {
            if utility(inst, i, r)? < 0 || r.payments.as_ref().is_some_and(|p| p[i] < 0) {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let truthful = run_with_payments(instance, mechanism, rule)?;
    let honest = true_utility(truth, &truthful, bidder)?;
    let mut ir_violations = usize::from(irrational(instance, &truthful)?);
    let points = breakpoints(instance.m(), instance.n());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best_gain = i64::MIN;
    let mut witness = None;
    for _ in 0..samples {
        let lie = sample_misreport(truth, instance.m(), &points, &mut rng);
        let lied = instance.with_bidder(bidder, lie.clone())?;
        let result = run_with_payments(&lied, mechanism, rule)?;
        ir_violations += usize::from(irrational(&lied, &result)?);
        let gain = true_utility(truth, &result, bidder)? - honest;
        if gain > best_gain {
            best_gain = gain;
            witness = (gain > 0).then(|| ValuationRecord::from(&lie));
        }
    }
    Ok(MisreportReport {
        bidder,
        truthful_utility: honest,
        best_gain,
        witness,
        samples,
        ir_violations,
    })
}

/// Quantities where some mechanism's range changes shape for `(m, n)`.
pub fn breakpoints(m: Quantity, n: usize) -> Vec<Quantity> {
    let mut out = BTreeSet::new();
    let BundleScheme {
        bundle_size,
        count,
        remainder,
    } = BundleScheme::for_supply(m, n);
    for c in 0..=count {
        out.extend([c * bundle_size, c * bundle_size + remainder]);
    }
    for d in 1..=n as u64 {
        let b = (m / (d * d)).max(1);
        out.extend((1..=(d * d).min(m / b)).map(|c| c * b));
    }
    for &level in build_l_grid(m, n).levels() {
        let (b, qmax) = lift_bundles(level, n);
        out.extend((1..=qmax).map(|c| c * b));
        out.extend([level, m - level]);
    }
    out.extend(SubadditiveGrid::default().grid(m));
    out.into_iter().filter(|&q| (1..=m).contains(&q)).collect()
}

fn scaled(p: Value, (num, den): (u64, u64)) -> Value {
    (u128::from(p) * u128::from(num) / u128::from(den)).min(u128::from(VALUE_CAP)) as Value
}

fn draw_factor<R: Rng>(rng: &mut R) -> (u64, u64) {
    const FIXED: [(u64, u64); 6] = [(0, 1), (1, 2), (2, 1), (3, 1), (10, 1), (100, 1)];
    if rng.gen_bool(0.5) {
        *FIXED.choose(rng).expect("non-empty")
    } else {
        (rng.gen_range(0..=8), rng.gen_range(1..=4))
    }
}

fn draw_quantity<R: Rng>(
    current: Quantity,
    m: Quantity,
    points: &[Quantity],
    rng: &mut R,
) -> Quantity {
    match rng.gen_range(0..3) {
        0 => current.saturating_add(1).min(m),
        1 => current.saturating_sub(1).max(1),
        _ => points.choose(rng).copied().unwrap_or(m),
    }
}

/// A same-kind perturbation of `truth`; see the module docs.
pub fn sample_misreport<R: Rng>(
    truth: &Valuation,
    m: Quantity,
    points: &[Quantity],
    rng: &mut R,
) -> Valuation {
    let top = truth.value(m);
    let price_cap = top.saturating_mul(2).clamp(10, VALUE_CAP);
    let strategy = rng.gen_range(0..7);
    if strategy == 0 {
        return truth.zero_like();
    }
    if strategy == 6 {
        let (kind, size) = match truth {
            Valuation::KMinded(k) => (GenKind::KMinded, k.bids().len() + 1),
            Valuation::MarginalPiecewise(p) => (GenKind::MarginalPiecewise, p.tuples().len() + 1),
            Valuation::Table(_) => (GenKind::Table, 1),
        };
        return random_valuation(kind, m, size, price_cap, rng);
    }
    match truth {
        Valuation::KMinded(k) => perturb_k_minded(k, strategy, m, points, price_cap, rng),
        Valuation::MarginalPiecewise(p) => {
            perturb_piecewise(p, strategy, m, points, price_cap, rng)
        }
        Valuation::Table(t) => perturb_table(t, strategy, m, points, price_cap, rng),
    }
}

fn perturb_k_minded<R: Rng>(
    k: &KMinded,
    strategy: u32,
    m: Quantity,
    points: &[Quantity],
    price_cap: Value,
    rng: &mut R,
) -> Valuation {
    let mut bids = k.bids().to_vec();
    match strategy {
        1 => {
            let factor = draw_factor(rng);
            bids.iter_mut().for_each(|b| b.1 = scaled(b.1, factor));
        }
        2 if !bids.is_empty() => {
            let j = rng.gen_range(0..bids.len());
            bids[j].0 = draw_quantity(bids[j].0, m, points, rng);
        }
        3 if !bids.is_empty() => {
            bids.remove(rng.gen_range(0..bids.len()));
        }
        5 if !bids.is_empty() => {
            let j = rng.gen_range(0..bids.len());
            bids[j].1 = rng.gen_range(0..=price_cap);
        }
        _ => {
            let q = if rng.gen_bool(0.5) {
                rng.gen_range(1..=m)
            } else {
                draw_quantity(m, m, points, rng)
            };
            bids.push((q, rng.gen_range(0..=price_cap)));
        }
    }
    let mut merged: BTreeMap<Quantity, Value> = BTreeMap::new();
    for (q, p) in bids {
        let e = merged.entry(q).or_insert(p);
        *e = (*e).max(p);
    }
    KMinded::new(merged.into_iter().collect())
        .expect("distinct positive quantities")
        .into()
}

fn perturb_piecewise<R: Rng>(
    pw: &MarginalPiecewise,
    strategy: u32,
    m: Quantity,
    points: &[Quantity],
    price_cap: Value,
    rng: &mut R,
) -> Valuation {
    let marginal_cap = (price_cap / m).max(1);
    let mut tuples = pw.tuples().to_vec();
    let movable = tuples.len() > 1;
    match strategy {
        1 => {
            let factor = draw_factor(rng);
            tuples.iter_mut().for_each(|t| t.1 = scaled(t.1, factor));
        }
        2 if movable => {
            let j = rng.gen_range(1..tuples.len());
            tuples[j].0 = draw_quantity(tuples[j].0 - 1, m, points, rng) + 1;
        }
        3 if movable => {
            tuples.remove(rng.gen_range(1..tuples.len()));
        }
        5 => {
            let j = rng.gen_range(0..tuples.len());
            tuples[j].1 = rng.gen_range(0..=marginal_cap);
        }
        _ => {
            let u = draw_quantity(rng.gen_range(1..=m), m, points, rng) + 1;
            tuples.push((u, rng.gen_range(0..=marginal_cap)));
        }
    }
    let mut merged: BTreeMap<Quantity, Value> =
        tuples.into_iter().filter(|&(u, _)| u >= 1).collect();
    merged.entry(1).or_insert(0);
    let lie = MarginalPiecewise::new(merged.into_iter().collect())
        .expect("increasing breakpoints from 1");
    if lie.value(m) > VALUE_CAP {
        return MarginalPiecewise::zero().into();
    }
    lie.into()
}

fn perturb_table<R: Rng>(
    t: &Table,
    strategy: u32,
    m: Quantity,
    points: &[Quantity],
    price_cap: Value,
    rng: &mut R,
) -> Valuation {
    let v = t.values();
    let at = |q: Quantity| v[q as usize];
    let b = points.choose(rng).copied().unwrap_or(m);
    let values: Vec<Value> = match strategy {
        1 => {
            let factor = draw_factor(rng);
            v.iter().map(|&x| scaled(x, factor)).collect()
        }
        2 => match rng.gen_range(0..4) {
            0 => (0..=m)
                .map(|q| if q == 0 { 0 } else { at((q + 1).min(m)) })
                .collect(),
            1 => (0..=m).map(|q| at(q.saturating_sub(1))).collect(),
            2 => (0..=m).map(|q| at(q.min(b))).collect(),
            _ => (0..=m)
                .map(|q| if q >= b { at(m) } else { at(q) })
                .collect(),
        },
        3 => {
            let c = rng.gen_range(0..=at(m));
            v.iter().map(|&x| x.min(c)).collect()
        }
        5 => {
            let x = rng.gen_range(0..=price_cap);
            (0..=m)
                .map(|q| {
                    if q >= b {
                        (at(q) + x).min(VALUE_CAP)
                    } else {
                        at(q)
                    }
                })
                .collect()
        }
        _ => {
            let c = rng.gen_range(0..=price_cap);
            (0..=m)
                .map(|q| if q >= b { at(q).max(c) } else { at(q) })
                .collect()
        }
    };
    Table::new(values).expect("monotone and normalized").into()
}
