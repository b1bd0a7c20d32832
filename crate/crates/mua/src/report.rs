//! Machine-readable run reports.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use mua_core::vcg::{payments_for, PaymentRule};
use mua_core::{Allocation, Bidder, Instance, QueryCounted, Value, Witness};
use serde::Serialize;

use crate::mechanisms::MechanismConfig;
use crate::testkit::brute_force_opt;
use crate::{Error, Result};

/// Payment rule as chosen on the command line; `None` skips payments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Payments(pub Option<PaymentRule>);

impl FromStr for Payments {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(Self(match s {
            "none" => None,
            "clarke" => Some(PaymentRule::Clarke),
            "zero-pivot" => Some(PaymentRule::ZeroPivot),
            _ => {
                return Err(format!(
                    "unknown payment rule `{s}` (expected none, clarke or zero-pivot)"
                ))
            }
        }))
    }
}

impl fmt::Display for Payments {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            None => "none",
            Some(PaymentRule::Clarke) => "clarke",
            Some(PaymentRule::ZeroPivot) => "zero-pivot",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub oracle_welfare: Value,
    /// `welfare/oracle_welfare`, unreduced.
    pub ratio: String,
    pub guarantee: String,
    pub pass: bool,
}

/// Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub mechanism: MechanismConfig,
    pub m: u64,
    pub n: usize,
    pub allocation: Allocation,
    pub welfare: Value,
    pub payments: Option<Vec<i64>>,
    pub witness: Witness,
    /// Distinct value queries issued by the allocation run, summed over bidders.
    pub queries: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports always serialize");
        out.push('\n');
        out
    }
}

/// Runs the mechanism once under query counting, then computes payments.
pub fn run(
    instance: &Instance,
    config: MechanismConfig,
    payments: Payments,
    timing: bool,
) -> Result<RunReport> {
    let mechanism = config.build();
    let start = Instant::now();
    let counted: Vec<QueryCounted> = instance
        .bidders()
        .iter()
        .map(|v| QueryCounted::new(v))
        .collect();
    let refs: Vec<&dyn Bidder> = counted.iter().map(|c| c as &dyn Bidder).collect();
    let result = mechanism.run(instance.m(), &refs)?;
    let queries = counted.iter().map(QueryCounted::distinct_queries).sum();
    let payments = match payments.0 {
        Some(rule) => Some(payments_for(
            instance,
            mechanism.as_ref(),
            &result.allocation,
            rule,
        )?),
        None => None,
    };
    let elapsed_us = timing.then(|| start.elapsed().as_micros() as u64);
    Ok(RunReport {
        mechanism: config,
        m: instance.m(),
        n: instance.n(),
        allocation: result.allocation,
        welfare: result.welfare,
        payments,
        witness: result.witness,
        queries,
        elapsed_us,
        verification: None,
    })
}

/// [`run`] plus a comparison against the brute-force optimum; passes when the
/// welfare meets the mechanism's guarantee exactly.
pub fn verify(
    instance: &Instance,
    config: MechanismConfig,
    payments: Payments,
    timing: bool,
) -> Result<RunReport> {
    let guarantee = config.build().guarantee(instance.n()).ok_or_else(|| {
        Error::InvalidArgument(format!("{config} promises no approximation ratio"))
    })?;
    let mut report = run(instance, config, payments, timing)?;
    let (_, optimum) = brute_force_opt(instance)?;
    report.verification = Some(Verification {
        oracle_welfare: optimum,
        ratio: format!("{}/{}", report.welfare, optimum),
        guarantee: guarantee.to_string(),
        pass: guarantee.is_met(report.welfare, optimum),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::MechanismId;
    use crate::testkit::gen_onepoint;
    use mua_core::KMinded;

    fn tight() -> Instance {
        let one = |q, p| KMinded::new(vec![(q, p)]).unwrap().into();
        Instance::new(8, vec![one(7, 10), one(1, 10)]).unwrap()
    }

    #[test]
    fn verify_examples() {
        let r = verify(
            &tight(),
            MechanismConfig::simple(MechanismId::Half),
            Payments(None),
            false,
        )
        .unwrap();
        let v = r.verification.unwrap();
        assert_eq!((v.ratio.as_str(), v.pass), ("10/20", true));

        let inst = gen_onepoint(&[2, 3, 4], 9).unwrap();
        let v = verify(&inst, MechanismConfig::ptas(1), Payments(None), false)
            .unwrap()
            .verification
            .unwrap();
        assert_eq!(
            (v.ratio.as_str(), v.guarantee.as_str(), v.pass),
            ("2/3", "1/2", true)
        );

        let v = verify(
            &inst,
            MechanismConfig::simple(MechanismId::Brute),
            Payments(None),
            false,
        )
        .unwrap()
        .verification
        .unwrap();
        assert_eq!(v.ratio, "3/3");

        assert!(verify(
            &inst,
            MechanismConfig::simple(MechanismId::Greedy),
            Payments(None),
            false
        )
        .is_err());
    }

    #[test]
    fn run_counts_queries_and_pays() {
        let r = run(
            &tight(),
            MechanismConfig::simple(MechanismId::Brute),
            "clarke".parse().unwrap(),
            false,
        )
        .unwrap();
        assert_eq!(r.welfare, 20);
        assert_eq!(r.payments, Some(vec![0, 0]));
        assert_eq!(r.queries, 16);
        assert!(r.elapsed_us.is_none());
        assert!(!r.to_json().contains("elapsed"));
    }
}
