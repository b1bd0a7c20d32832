//! Oracles, instance families and a misreport fuzzer for checking the
//! mechanisms.

mod brute;
mod generators;
mod greedy;
mod misreport;

pub use brute::{brute_force_opt, Brute, BRUTE_MAX_ALLOCATIONS, BRUTE_MAX_SUPPLY};
pub use generators::{gen_onepoint, gen_random, gen_subadditive_hard, random_valuation, GenKind};
pub use greedy::{baseline_greedy_vcg, greedy_allocation, Greedy};
pub use misreport::{
    breakpoints, misreport_search, sample_misreport, true_utility, MisreportReport,
};

use mua_core::{welfare, Instance, Mechanism};

use crate::{Error, Result};

/// Whether the mechanism's welfare equals the best welfare over its own
/// independently enumerated range.
pub fn range_argmax_check(mechanism: &dyn Mechanism, instance: &Instance) -> Result<bool> {
    let range = mechanism
        .range(instance.m(), instance.n())
        .ok_or(Error::NoRange(mechanism.id()))?;
    let result = mechanism.solve(instance)?;
    let mut best = None;
    for a in &range {
        let w = welfare(instance, a)?;
        best = Some(best.map_or(w, |b: u64| b.max(w)));
    }
    Ok(range.contains(&result.allocation) && best == Some(result.welfare))
}
