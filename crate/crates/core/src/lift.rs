//! Lifting a `t`-bidder maximal-in-range solver to `n` bidders.
//!
//! For every level `l` of a geometric grid `L` over `0..=m` and every set `T`
//! of at most `t` bidders, the inner solver allocates `m - l` items to `T`;
//! the other `l` items are cut into at most `2n^2` bundles of
//! `max(floor(l / 2n^2), 1)` items that a dynamic program splits among the
//! bidders outside `T`. The best of these candidates wins. If the inner
//! solver guarantees a fraction `alpha` of optimal welfare, the lifted
//! mechanism guarantees `alpha - 1/(t+1)`.
//!
//! Four inner solvers are provided: exhaustive search over k-minded bids,
//! everything-to-one-bidder, exact search for marginal-piecewise bids, and a
//! power-grid search for subadditive valuations.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::bundles::dp_equal_bundles;
use crate::combinatorics::{for_each_composition, subsets_up_to};
use crate::model::sum_values;
use crate::valuation::Bidder;
use crate::{Allocation, Error, Mechanism, MechanismResult, Quantity, Ratio, Value, Witness};

/// `{floor(base^i) : i >= 0, base^i <= cap}`, ascending and deduplicated.
fn floor_powers(base: f64, cap: Quantity) -> Vec<Quantity> {
    let mut out: Vec<Quantity> = Vec::new();
    let limit = cap as f64;
    let mut x = 1.0f64;
    while x <= limit {
        let q = x as Quantity;
        if out.last() != Some(&q) {
            out.push(q);
        }
        x *= base;
    }
    out
}

/// Levels `{0, 1, floor(u), floor(u^2), ..., m}` with `u = 1 + 1/(2n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LGrid(Vec<Quantity>);

impl LGrid {
    pub fn levels(&self) -> &[Quantity] {
        &self.0
    }

    pub fn contains(&self, level: Quantity) -> bool {
        self.0.binary_search(&level).is_ok()
    }

    /// Largest level not above `q`.
    pub fn floor_level(&self, q: Quantity) -> Quantity {
        self.0[self.0.partition_point(|&l| l <= q) - 1]
    }
}

pub fn build_l_grid(m: Quantity, n: usize) -> LGrid {
    let u = 1.0 + 1.0 / (2.0 * n as f64);
    let mut levels: BTreeSet<Quantity> = floor_powers(u, m).into_iter().collect();
    levels.extend([0, 1, m]);
    LGrid(levels.into_iter().collect())
}

/// A maximal-in-range solver for a bounded number of bidders.
///
/// `solve` must return one share per bidder with total at most `supply`, and
/// must maximize welfare over a set of allocations that depends only on the
/// bidder count and `supply`; `range` lists that set when it is small enough.
pub trait InnerSolver {
    fn name(&self) -> &'static str;

    fn capacity(&self) -> usize;

    fn guarantee(&self) -> Ratio;

    fn solve(&self, bidders: &[&dyn Bidder], supply: Quantity) -> Result<Vec<Quantity>, Error>;

    fn range(&self, _bidders: usize, _supply: Quantity) -> Option<Vec<Vec<Quantity>>> {
        None
    }
}

impl<S: InnerSolver + ?Sized> InnerSolver for Box<S> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn capacity(&self) -> usize {
        (**self).capacity()
    }

    fn guarantee(&self) -> Ratio {
        (**self).guarantee()
    }

    fn solve(&self, bidders: &[&dyn Bidder], supply: Quantity) -> Result<Vec<Quantity>, Error> {
        (**self).solve(bidders, supply)
    }

    fn range(&self, bidders: usize, supply: Quantity) -> Option<Vec<Vec<Quantity>>> {
        (**self).range(bidders, supply)
    }
}

fn all_allocations(bidders: usize, supply: Quantity) -> Vec<Vec<Quantity>> {
    let mut out = Vec::new();
    for_each_composition(bidders, supply, |c| out.push(c.to_vec()));
    out
}

/// Calls `f` on every pick of one entry per list, in lexicographic order.
fn for_each_product(lists: &[Vec<Quantity>], f: &mut impl FnMut(&[Quantity])) {
    fn go(lists: &[Vec<Quantity>], buf: &mut Vec<Quantity>, f: &mut impl FnMut(&[Quantity])) {
        if buf.len() == lists.len() {
            f(buf);
            return;
        }
        for &x in &lists[buf.len()] {
            buf.push(x);
            go(lists, buf, f);
            buf.pop();
        }
    }
    go(lists, &mut Vec::with_capacity(lists.len()), f);
}

/// Best feasible pick, keeping the first on ties.
fn best_pick(
    bidders: &[&dyn Bidder],
    supply: Quantity,
    lists: &[Vec<Quantity>],
) -> (Vec<Quantity>, Value) {
    let mut best = (vec![0; bidders.len()], 0);
    let mut found = false;
    for_each_product(lists, &mut |pick| {
        if pick.iter().sum::<Quantity>() > supply {
            return;
        }
        let value = sum_values(bidders, pick);
        if !found || value > best.1 {
            best = (pick.to_vec(), value);
            found = true;
        }
    });
    best
}

/// Exact search over each bidder's bid quantities (or nothing).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveKMinded {
    pub capacity: usize,
}

impl Default for ExhaustiveKMinded {
    fn default() -> Self {
        Self { capacity: 4 }
    }
}

impl InnerSolver for ExhaustiveKMinded {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn guarantee(&self) -> Ratio {
        Ratio::ONE
    }

    fn solve(&self, bidders: &[&dyn Bidder], supply: Quantity) -> Result<Vec<Quantity>, Error> {
        let mut lists = Vec::with_capacity(bidders.len());
        for (i, b) in bidders.iter().enumerate() {
            let k = b
                .valuation()
                .and_then(|v| v.as_k_minded())
                .ok_or(Error::KindMismatch {
                    bidder: i,
                    expected: "k_minded",
                })?;
            let mut options = vec![0];
            options.extend(
                k.bids()
                    .iter()
                    .filter(|&&(q, p)| p > 0 && q <= supply)
                    .map(|&(q, _)| q),
            );
            lists.push(options);
        }
        Ok(best_pick(bidders, supply, &lists).0)
    }

    fn range(&self, bidders: usize, supply: Quantity) -> Option<Vec<Vec<Quantity>>> {
        Some(all_allocations(bidders, supply))
    }
}

/// All items to the only bidder.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SingleBidder;

impl InnerSolver for SingleBidder {
    fn name(&self) -> &'static str {
        "single"
    }

    fn capacity(&self) -> usize {
        1
    }

    fn guarantee(&self) -> Ratio {
        Ratio::ONE
    }

    fn solve(&self, bidders: &[&dyn Bidder], supply: Quantity) -> Result<Vec<Quantity>, Error> {
        match bidders.len() {
            0 => Ok(Vec::new()),
            1 => Ok(vec![supply]),
            n => Err(Error::InnerCapacity {
                requested: n,
                capacity: 1,
            }),
        }
    }

    fn range(&self, bidders: usize, supply: Quantity) -> Option<Vec<Vec<Quantity>>> {
        match bidders {
            0 => Some(vec![Vec::new()]),
            1 => Some(vec![vec![supply]]),
            _ => None,
        }
    }
}

/// Exact search for marginal-piecewise bidders.
///
/// Some optimal allocation has every bidder but one sitting where its marginal
/// changes (or at 0, or at the whole supply); that one bidder takes whatever
/// is left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PiecewiseExact {
    pub capacity: usize,
}

impl Default for PiecewiseExact {
    fn default() -> Self {
        Self { capacity: 4 }
    }
}

impl InnerSolver for PiecewiseExact {
    fn name(&self) -> &'static str {
        "piecewise"
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn guarantee(&self) -> Ratio {
        Ratio::ONE
    }

    fn solve(&self, bidders: &[&dyn Bidder], supply: Quantity) -> Result<Vec<Quantity>, Error> {
        let mut candidates = Vec::with_capacity(bidders.len());
        for (i, b) in bidders.iter().enumerate() {
            let pw = b
                .valuation()
                .and_then(|v| v.as_piecewise())
                .ok_or(Error::KindMismatch {
                    bidder: i,
                    expected: "marginal_piecewise",
                })?;
            let mut set: BTreeSet<Quantity> = pw.breakpoints().filter(|&q| q <= supply).collect();
            set.extend([0, supply]);
            candidates.push(set.into_iter().collect::<Vec<_>>());
        }
        Ok(designated_search(bidders, supply, &candidates))
    }

    fn range(&self, bidders: usize, supply: Quantity) -> Option<Vec<Vec<Quantity>>> {
        Some(all_allocations(bidders, supply))
    }
}

/// For each designated bidder `j`, everyone else picks from their candidate
/// list and `j` takes the rest.
fn designated_search(
    bidders: &[&dyn Bidder],
    supply: Quantity,
    candidates: &[Vec<Quantity>],
) -> Vec<Quantity> {
    let n = bidders.len();
    let mut best: Option<(Vec<Quantity>, Value)> = None;
    for j in 0..n {
        let mut lists = candidates.to_vec();
        lists[j] = vec![0];
        for_each_product(&lists, &mut |pick| {
            let used: Quantity = pick.iter().sum();
            if used > supply {
                return;
            }
            let mut shares = pick.to_vec();
            shares[j] = supply - used;
            let value = sum_values(bidders, &shares);
            if best.as_ref().is_none_or(|b| value > b.1) {
                best = Some((shares, value));
            }
        });
    }
    best.map_or_else(Vec::new, |b| b.0)
}

/// Everyone but one designated bidder receives `0` or `floor(delta^i)` items;
/// the designated bidder receives the rest. At least `3/4` of optimal for
/// subadditive valuations with `delta = 4/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubadditiveGrid {
    pub capacity: usize,
    pub delta: Ratio,
}

impl Default for SubadditiveGrid {
    fn default() -> Self {
        Self {
            capacity: 4,
            delta: Ratio::new(4, 3),
        }
    }
}

impl SubadditiveGrid {
    /// `{0} ∪ {floor(delta^i) <= supply}`.
    pub fn grid(&self, supply: Quantity) -> Vec<Quantity> {
        assert!(self.delta.num > self.delta.den, "delta must exceed 1");
        let base = self.delta.num as f64 / self.delta.den as f64;
        let mut grid = vec![0];
        grid.extend(floor_powers(base, supply));
        grid
    }
}

impl InnerSolver for SubadditiveGrid {
    fn name(&self) -> &'static str {
        "subadditive"
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn guarantee(&self) -> Ratio {
        Ratio::new(3, 4)
    }

    fn solve(&self, bidders: &[&dyn Bidder], supply: Quantity) -> Result<Vec<Quantity>, Error> {
        let grid = self.grid(supply);
        Ok(designated_search(
            bidders,
            supply,
            &vec![grid; bidders.len()],
        ))
    }

    fn range(&self, bidders: usize, supply: Quantity) -> Option<Vec<Vec<Quantity>>> {
        if bidders == 0 {
            return Some(vec![Vec::new()]);
        }
        let grid = self.grid(supply);
        let mut out = BTreeSet::new();
        for j in 0..bidders {
            let mut lists = vec![grid.clone(); bidders];
            lists[j] = vec![0];
            for_each_product(&lists, &mut |pick| {
                let used: Quantity = pick.iter().sum();
                if used <= supply {
                    let mut shares = pick.to_vec();
                    shares[j] = supply - used;
                    out.insert(shares);
                }
            });
        }
        Some(out.into_iter().collect())
    }
}

/// Bundle size and count used for the `l` items left to bidders outside `T`.
pub fn lift_bundles(level: Quantity, n: usize) -> (Quantity, u64) {
    let cap = 2 * (n as u64) * (n as u64);
    let size = (level / cap).max(1);
    (size, cap.min(level / size))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lift<S> {
    pub inner: S,
    pub t: usize,
}

impl<S: InnerSolver> Lift<S> {
    pub fn new(inner: S, t: usize) -> Self {
        Self { inner, t }
    }
}

pub fn lift_solve(
    m: Quantity,
    bidders: &[&dyn Bidder],
    inner: &dyn InnerSolver,
    t: usize,
) -> Result<MechanismResult, Error> {
    let n = bidders.len();
    let t = t.min(n);
    if t > inner.capacity() {
        return Err(Error::InnerCapacity {
            requested: t,
            capacity: inner.capacity(),
        });
    }
    let grid = build_l_grid(m, n);
    let subsets = subsets_up_to(n, t);

    let mut best: Option<(Value, Vec<Quantity>, Witness)> = None;
    for &level in grid.levels() {
        let (bundle_size, qmax) = lift_bundles(level, n);
        for members in &subsets {
            let supply = m - level;
            let inner_bidders: Vec<&dyn Bidder> = members.iter().map(|&i| bidders[i]).collect();
            let inner_shares = inner.solve(&inner_bidders, supply).map_err(|e| match e {
                Error::KindMismatch { bidder, expected } => Error::KindMismatch {
                    bidder: members[bidder],
                    expected,
                },
                other => other,
            })?;
            if inner_shares.len() != members.len()
                || inner_shares.iter().map(|&s| u128::from(s)).sum::<u128>() > u128::from(supply)
            {
                return Err(Error::InnerInfeasible {
                    solver: inner.name(),
                });
            }

            let outside: Vec<usize> = (0..n).filter(|i| !members.contains(i)).collect();
            let outside_bidders: Vec<&dyn Bidder> = outside.iter().map(|&i| bidders[i]).collect();
            let (counts, bundle_value) = dp_equal_bundles(&outside_bidders, bundle_size, qmax);

            let mut shares = vec![0; n];
            let mut bundle_counts = vec![0; n];
            for (&i, &s) in members.iter().zip(&inner_shares) {
                shares[i] = s;
            }
            for (&i, &c) in outside.iter().zip(&counts) {
                shares[i] = c * bundle_size;
                bundle_counts[i] = c;
            }
            let value = sum_values(&inner_bidders, &inner_shares) + bundle_value;
            if best.as_ref().is_none_or(|b| value > b.0) {
                best = Some((
                    value,
                    shares,
                    Witness::Lift {
                        members: members.clone(),
                        level,
                        bundle_size,
                        bundle_counts,
                        inner_shares,
                    },
                ));
            }
        }
    }

    let (welfare, shares, witness) = best.expect("grid always holds level 0");
    Ok(MechanismResult {
        allocation: Allocation::new(shares),
        welfare,
        payments: None,
        witness,
    })
}

/// Every allocation the lift can output for `(m, n)`, rebuilt from the grid,
/// the subsets, the inner solver's range and all bundle splits. `None` when
/// the inner solver cannot list its range.
pub fn enumerate_lift_range(
    m: Quantity,
    n: usize,
    inner: &dyn InnerSolver,
    t: usize,
) -> Option<Vec<Allocation>> {
    let t = t.min(n);
    let mut out = BTreeSet::new();
    for &level in build_l_grid(m, n).levels() {
        let (bundle_size, qmax) = lift_bundles(level, n);
        for members in subsets_up_to(n, t) {
            let outside: Vec<usize> = (0..n).filter(|i| !members.contains(i)).collect();
            for inner_shares in inner.range(members.len(), m - level)? {
                for_each_composition(outside.len(), qmax, |counts| {
                    let mut shares = vec![0; n];
                    for (&i, &s) in members.iter().zip(&inner_shares) {
                        shares[i] = s;
                    }
                    for (&i, &c) in outside.iter().zip(counts) {
                        shares[i] = c * bundle_size;
                    }
                    out.insert(Allocation::new(shares));
                });
            }
        }
    }
    Some(out.into_iter().collect())
}

/// Whether `allocation` is round for its witness: `|T| <= t`, the level is on
/// the grid, `T`'s shares are in the inner range for `m - l` items, and the
/// others hold whole bundles within the bundle budget.
pub fn check_lift_witness(
    m: Quantity,
    allocation: &[Quantity],
    witness: &Witness,
    inner: &dyn InnerSolver,
    t: usize,
) -> bool {
    let Witness::Lift {
        members,
        level,
        bundle_size,
        bundle_counts,
        inner_shares,
    } = witness
    else {
        return false;
    };
    let n = allocation.len();
    if members.len() > t.min(n) || !build_l_grid(m, n).contains(*level) {
        return false;
    }
    let (size, qmax) = lift_bundles(*level, n);
    if size != *bundle_size {
        return false;
    }
    let held: Vec<Quantity> = members.iter().map(|&i| allocation[i]).collect();
    if &held != inner_shares || held.iter().sum::<Quantity>() > m - level {
        return false;
    }
    if let Some(range) = inner.range(members.len(), m - level) {
        if !range.contains(&held) {
            return false;
        }
    }
    let mut used = 0;
    for i in (0..n).filter(|i| !members.contains(i)) {
        if allocation[i] != bundle_counts[i] * size {
            return false;
        }
        used += bundle_counts[i];
    }
    used <= qmax
}

impl<S: InnerSolver> Mechanism for Lift<S> {
    fn id(&self) -> &'static str {
        "lift"
    }

    fn run(&self, m: Quantity, bidders: &[&dyn Bidder]) -> Result<MechanismResult, Error> {
        lift_solve(m, bidders, &self.inner, self.t)
    }

    fn range(&self, m: Quantity, n: usize) -> Option<Vec<Allocation>> {
        enumerate_lift_range(m, n, &self.inner, self.t)
    }

    fn guarantee(&self, n: usize) -> Option<Ratio> {
        let t = self.t.min(n);
        let alpha = self.inner.guarantee();
        Some(if t >= n {
            alpha
        } else {
            alpha.minus_reciprocal(t)
        })
    }
}
