//! JSON instance files.
//!
//! ```json
//! {"m": 8, "bidders": [
//!   {"kind": "k_minded", "bids": [[7, 10]]},
//!   {"kind": "marginal_piecewise", "tuples": [[1, 3], [4, 1]]},
//!   {"kind": "table", "values": [0, 1, 1, 2, 2, 2, 3, 3, 3]}
//! ]}
//! ```

use std::io::Read;
use std::path::Path;

use mua_core::{Instance, KMinded, MarginalPiecewise, Table, Valuation, Value, VALUE_CAP};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValuationRecord {
    KMinded { bids: Vec<(u64, u64)> },
    MarginalPiecewise { tuples: Vec<(u64, u64)> },
    Table { values: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRecord {
    pub m: u64,
    pub bidders: Vec<ValuationRecord>,
}

impl From<&Valuation> for ValuationRecord {
    fn from(v: &Valuation) -> Self {
        match v {
            Valuation::KMinded(k) => Self::KMinded {
                bids: k.bids().to_vec(),
            },
            Valuation::MarginalPiecewise(p) => Self::MarginalPiecewise {
                tuples: p.tuples().to_vec(),
            },
            Valuation::Table(t) => Self::Table {
                values: t.values().to_vec(),
            },
        }
    }
}

impl From<&Instance> for InstanceRecord {
    fn from(instance: &Instance) -> Self {
        Self {
            m: instance.m(),
            bidders: instance.bidders().iter().map(Into::into).collect(),
        }
    }
}

fn capped(bidder: usize, values: impl IntoIterator<Item = Value>) -> Result<()> {
    match values.into_iter().find(|&v| v > VALUE_CAP) {
        Some(value) => Err(Error::ValueCap {
            bidder,
            value,
            cap: VALUE_CAP,
        }),
        None => Ok(()),
    }
}

/// Builds a valuation, rejecting prices, marginals or entries above
/// [`VALUE_CAP`].
pub fn parse_valuation(bidder: usize, record: &ValuationRecord) -> Result<Valuation> {
    let wrap = |e| Error::Core(mua_core::Error::valuation(bidder, e));
    Ok(match record {
        ValuationRecord::KMinded { bids } => {
            capped(bidder, bids.iter().map(|b| b.1))?;
            KMinded::new(bids.clone()).map_err(wrap)?.into()
        }
        ValuationRecord::MarginalPiecewise { tuples } => {
            capped(bidder, tuples.iter().map(|t| t.1))?;
            MarginalPiecewise::new(tuples.clone()).map_err(wrap)?.into()
        }
        ValuationRecord::Table { values } => {
            capped(bidder, values.iter().copied())?;
            Table::new(values.clone()).map_err(wrap)?.into()
        }
    })
}

impl TryFrom<&InstanceRecord> for Instance {
    type Error = Error;

    fn try_from(record: &InstanceRecord) -> Result<Self> {
        let bidders = record
            .bidders
            .iter()
            .enumerate()
            .map(|(i, r)| parse_valuation(i, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance::new(record.m, bidders)?)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let record: InstanceRecord = serde_json::from_str(text)?;
    Instance::try_from(&record)
}

/// Reads an instance from a file, or from standard input for `-`.
pub fn read_instance(path: &Path) -> Result<Instance> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)?;
    }
    parse_instance(&text)
}

/// One bidder per line.
pub fn instance_to_json(instance: &Instance) -> String {
    let record = InstanceRecord::from(instance);
    let bidders: Vec<String> = record
        .bidders
        .iter()
        .map(|b| {
            format!(
                "    {}",
                serde_json::to_string(b).expect("valuation records always serialize")
            )
        })
        .collect();
    format!(
        "{{\n  \"m\": {},\n  \"bidders\": [\n{}\n  ]\n}}\n",
        record.m,
        bidders.join(",\n")
    )
}
