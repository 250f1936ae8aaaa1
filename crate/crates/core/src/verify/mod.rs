//! Proof-chain checks, theorem ratio rows and parameter sweeps.
//!
//! Inequalities whose constant is explicit are checked exactly, on integers,
//! and recorded as [`CheckKind::Exact`]. Bounds with an implied constant are
//! only ever reported, as [`CheckKind::Report`] rows or [`RatioRow`]s.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

mod lemma;
mod phi;
mod quad;
mod shifted;
mod sweep;
mod theorems;

pub use lemma::{lemma_chain_check, Caps, KChoice, LemmaKind};
pub use phi::{phi_chain, phi_count, PHI_MAX_SIZE};
pub use quad::{quad_energy, quad_energy_brute, quad_histogram, solution_count_m, QuadVariant};
pub use shifted::{
    composite_n_check, count_n_shifted, count_x, count_x_brute, holder_weighted_sum, n_chain_check,
    sextuple_count, Holder, NShifted, BRUTE_X_MAX,
};
pub use sweep::{
    run_sweep, Aggregates, ChainKind, FailureRef, FamilyKind, FnSet, Report, SeedRange, SizeSpec,
    SweepConfig, SweepError, TheoremAgg,
};
pub use theorems::{
    theorem_ratio, write_rows_csv, RatioRow, TheoremId, TheoremInstance, CSV_HEADER,
};

/// An exact integer or a real number.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Int(BigUint),
    Real(f64),
}

impl Quantity {
    pub fn as_f64(&self) -> f64 {
        match self {
            Quantity::Int(v) => v.to_string().parse().unwrap_or(f64::INFINITY),
            Quantity::Real(v) => *v,
        }
    }

    fn compare(&self, other: &Quantity) -> Option<Ordering> {
        match (self, other) {
            (Quantity::Int(a), Quantity::Int(b)) => Some(a.cmp(b)),
            _ => self.as_f64().partial_cmp(&other.as_f64()),
        }
    }
}

impl From<u64> for Quantity {
    fn from(v: u64) -> Self {
        Quantity::Int(BigUint::from(v))
    }
}

impl From<u128> for Quantity {
    fn from(v: u128) -> Self {
        Quantity::Int(BigUint::from(v))
    }
}

impl From<usize> for Quantity {
    fn from(v: usize) -> Self {
        Quantity::Int(BigUint::from(v))
    }
}

impl From<BigUint> for Quantity {
    fn from(v: BigUint) -> Self {
        Quantity::Int(v)
    }
}

impl From<f64> for Quantity {
    fn from(v: f64) -> Self {
        Quantity::Real(v)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Int(v) => write!(f, "{v}"),
            Quantity::Real(v) => write!(f, "{v}"),
        }
    }
}

// Integers travel as decimal strings so that no JSON reader rounds them.
impl Serialize for Quantity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Quantity::Int(v) => s.serialize_str(&v.to_string()),
            Quantity::Real(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Num(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => s
                .parse()
                .map(Quantity::Int)
                .map_err(serde::de::Error::custom),
            Raw::Num(v) => Ok(Quantity::Real(v)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    fn holds(self, ord: Option<Ordering>) -> bool {
        match (self, ord) {
            (_, None) => false,
            (Relation::Le, Some(o)) => o != Ordering::Greater,
            (Relation::Ge, Some(o)) => o != Ordering::Less,
            (Relation::Eq, Some(o)) => o == Ordering::Equal,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Must hold on every instance.
    Exact,
    /// Informational; `pass` only says whether the bound held with
    /// constant 1.
    Report,
}

/// One named comparison `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub lhs: Quantity,
    pub relation: Relation,
    pub rhs: Quantity,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: &str, kind: CheckKind, lhs: Quantity, relation: Relation, rhs: Quantity) -> Self {
        let pass = relation.holds(lhs.compare(&rhs));
        let ratio = match kind {
            CheckKind::Report => {
                let r = rhs.as_f64();
                Some(if r > 0.0 {
                    lhs.as_f64() / r
                } else {
                    f64::INFINITY
                })
            }
            CheckKind::Exact => None,
        };
        Self {
            name: name.to_string(),
            kind,
            lhs,
            relation,
            rhs,
            pass,
            ratio,
            note: None,
        }
    }

    pub fn exact(
        name: &str,
        lhs: impl Into<Quantity>,
        relation: Relation,
        rhs: impl Into<Quantity>,
    ) -> Self {
        Self::new(name, CheckKind::Exact, lhs.into(), relation, rhs.into())
    }

    pub fn report(
        name: &str,
        lhs: impl Into<Quantity>,
        relation: Relation,
        rhs: impl Into<Quantity>,
    ) -> Self {
        Self::new(name, CheckKind::Report, lhs.into(), relation, rhs.into())
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_exact_failure(&self) -> bool {
        self.kind == CheckKind::Exact && !self.pass
    }
}

/// The checks of one chain on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub chain: String,
    pub instance: serde_json::Value,
    pub checks: Vec<Check>,
    /// Set when the chain did not run on this instance, with the reason.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl ChainReport {
    pub fn new(chain: &str, instance: serde_json::Value, checks: Vec<Check>) -> Self {
        Self {
            chain: chain.to_string(),
            instance,
            checks,
            skipped: None,
            timing_ms: None,
        }
    }

    pub fn skipped(chain: &str, instance: serde_json::Value, reason: impl Into<String>) -> Self {
        Self {
            skipped: Some(reason.into()),
            ..Self::new(chain, instance, Vec::new())
        }
    }

    /// True when every exact check holds.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.is_exact_failure())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.is_exact_failure())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub(crate) fn big(v: impl Into<BigUint>) -> BigUint {
    v.into()
}

/// `log₂ max(n, 2)`.
pub(crate) fn log2_floor2(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}
