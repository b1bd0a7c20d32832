//! Mechanisms by name.

use std::fmt;
use std::str::FromStr;

use mua_core::half::Half;
use mua_core::lift::{
    ExhaustiveKMinded, InnerSolver, Lift, PiecewiseExact, SingleBidder, SubadditiveGrid,
};
use mua_core::ptas::Ptas;
use mua_core::Mechanism;
use serde::Serialize;

use crate::testkit::{Brute, Greedy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismId {
    Ptas,
    Half,
    Lift,
    Brute,
    /// Density greedy; not maximal-in-range.
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerKind {
    Exhaustive,
    Single,
    Piecewise,
    Subadditive,
}

fn unknown(what: &str, s: &str, options: &str) -> String {
    format!("unknown {what} `{s}` (expected one of {options})")
}

impl FromStr for MechanismId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "ptas" => Self::Ptas,
            "half" => Self::Half,
            "lift" => Self::Lift,
            "brute" => Self::Brute,
            "greedy" => Self::Greedy,
            _ => return Err(unknown("mechanism", s, "ptas, half, lift, brute, greedy")),
        })
    }
}

impl fmt::Display for MechanismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ptas => "ptas",
            Self::Half => "half",
            Self::Lift => "lift",
            Self::Brute => "brute",
            Self::Greedy => "greedy",
        })
    }
}

impl FromStr for InnerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "exhaustive" => Self::Exhaustive,
            "single" => Self::Single,
            "piecewise" => Self::Piecewise,
            "subadditive" => Self::Subadditive,
            _ => {
                return Err(unknown(
                    "inner solver",
                    s,
                    "exhaustive, single, piecewise, subadditive",
                ))
            }
        })
    }
}

impl InnerKind {
    pub const ALL: [InnerKind; 4] = [
        Self::Exhaustive,
        Self::Single,
        Self::Piecewise,
        Self::Subadditive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exhaustive => "exhaustive",
            Self::Single => "single",
            Self::Piecewise => "piecewise",
            Self::Subadditive => "subadditive",
        }
    }

    pub fn solver(self) -> Box<dyn InnerSolver + Send + Sync> {
        match self {
            Self::Exhaustive => Box::new(ExhaustiveKMinded::default()),
            Self::Single => Box::new(SingleBidder),
            Self::Piecewise => Box::new(PiecewiseExact::default()),
            Self::Subadditive => Box::new(SubadditiveGrid::default()),
        }
    }
}

/// A mechanism plus the parameters it uses; `t` and `inner` are `None` where
/// they do not apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MechanismConfig {
    pub id: MechanismId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner: Option<InnerKind>,
}

impl MechanismConfig {
    pub fn new(id: MechanismId, t: usize, inner: InnerKind) -> Self {
        match id {
            MechanismId::Ptas => Self {
                id,
                t: Some(t),
                inner: None,
            },
            MechanismId::Lift => Self {
                id,
                t: Some(t),
                inner: Some(inner),
            },
            _ => Self {
                id,
                t: None,
                inner: None,
            },
        }
    }

    pub fn ptas(t: usize) -> Self {
        Self::new(MechanismId::Ptas, t, InnerKind::Exhaustive)
    }

    pub fn lift(inner: InnerKind, t: usize) -> Self {
        Self::new(MechanismId::Lift, t, inner)
    }

    pub fn simple(id: MechanismId) -> Self {
        Self::new(id, 0, InnerKind::Exhaustive)
    }

    pub fn build(&self) -> Box<dyn Mechanism + Send + Sync> {
        let t = self.t.unwrap_or(0);
        match self.id {
            MechanismId::Ptas => Box::new(Ptas::new(t)),
            MechanismId::Half => Box::new(Half),
            MechanismId::Lift => Box::new(Lift::new(
                self.inner.unwrap_or(InnerKind::Exhaustive).solver(),
                t,
            )),
            MechanismId::Brute => Box::new(Brute),
            MechanismId::Greedy => Box::new(Greedy),
        }
    }

    /// Whether the rule is maximal-in-range, so VCG payments make it truthful.
    pub fn is_mir(&self) -> bool {
        self.id != MechanismId::Greedy
    }
}

impl fmt::Display for MechanismConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)?;
        if let Some(inner) = self.inner {
            write!(f, "[{}]", inner.name())?;
        }
        if let Some(t) = self.t {
            write!(f, "(t={t})")?;
        }
        Ok(())
    }
}
