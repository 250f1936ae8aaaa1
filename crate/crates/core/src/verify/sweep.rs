//! Deterministic instance grids.
//!
//! Instances are enumerated in the order primes × families × sizes ×
//! function sets × seeds and numbered from 0. Workers evaluate instances
//! independently and the results are merged in instance order, so the
//! report does not depend on the worker count.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::lemma::{lemma_chain_check, Caps, KChoice, LemmaKind};
use super::phi::phi_chain;
use super::shifted::{composite_n_check, n_chain_check};
use super::theorems::{theorem_ratio, RatioRow, TheoremId, TheoremInstance};
use super::ChainReport;
use crate::error::{Error, Result};
use crate::field::{divisors, PrimeField};
use crate::functions::{FnSpec, FnTable};
use crate::sets::{generate, FSet, Family};

/// Size-driven set families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `{1, ..., n}`.
    Interval,
    /// `{1, 3, 5, ...}`.
    Ap,
    /// Powers of the primitive root, `{1, g, g², ...}`.
    Gp,
    /// Uniform over F_p^*, drawn from stream `(seed, role)` with roles
    /// `A = 0, B = 1, C = 2, D = 3`.
    Random,
    /// The subgroup of F_p^* whose order is the largest divisor of `p - 1`
    /// not exceeding `n`.
    #[serde(alias = "subgroup")]
    MulSubgroup,
}

impl FamilyKind {
    pub fn label(self) -> &'static str {
        match self {
            FamilyKind::Interval => "interval",
            FamilyKind::Ap => "ap",
            FamilyKind::Gp => "gp",
            FamilyKind::Random => "random",
            FamilyKind::MulSubgroup => "mul_subgroup",
        }
    }

    fn build(self, field: &PrimeField, n: usize, seed: u64, role: u64) -> Result<FSet> {
        let family = match self {
            FamilyKind::Interval => Family::Interval { start: 1, len: n },
            FamilyKind::Ap => Family::Ap {
                start: 1,
                step: 2,
                len: n,
            },
            FamilyKind::Gp => Family::Gp {
                start: 1,
                ratio: field.root(),
                len: n,
            },
            FamilyKind::Random => Family::Random {
                len: n,
                zero_free: true,
            },
            FamilyKind::MulSubgroup => {
                let order = divisors(field.p() - 1)
                    .into_iter()
                    .filter(|&d| d <= n as u64)
                    .max()
                    .unwrap_or(1);
                Family::MulSubgroup { order }
            }
        };
        generate(field, &family, seed, role)
    }
}

/// Sizes of `A, B, C, D`. A bare number sets all four.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SizeSpec {
    All(usize),
    Each {
        a: usize,
        b: usize,
        /// Defaults to `b`.
        #[serde(default)]
        c: Option<usize>,
        /// Defaults to `a`.
        #[serde(default)]
        d: Option<usize>,
    },
}

impl SizeSpec {
    pub fn resolve(self) -> [usize; 4] {
        match self {
            SizeSpec::All(n) => [n; 4],
            SizeSpec::Each { a, b, c, d } => [a, b, c.unwrap_or(b), d.unwrap_or(a)],
        }
    }
}

/// Seeds `start..end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl Default for SeedRange {
    fn default() -> Self {
        Self { start: 0, end: 1 }
    }
}

/// `f₁ = g₁(x)(h₁(x) + y)` and `f₂`; `g₂`, `h₂` default to `g₁`, `h₁`.
/// Seedless random functions draw from stream `(seed, 4..=7)` for
/// `g₁, h₁, g₂, h₂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnSet {
    pub g1: FnSpec,
    pub h1: FnSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<FnSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<FnSpec>,
}

impl Default for FnSet {
    fn default() -> Self {
        Self {
            g1: FnSpec::Identity,
            h1: FnSpec::Const(1),
            g2: None,
            h2: None,
        }
    }
}

impl FnSet {
    fn label(&self) -> String {
        let mut s = format!("g1={} h1={}", self.g1, self.h1);
        if let Some(g2) = &self.g2 {
            s += &format!(" g2={g2}");
        }
        if let Some(h2) = &self.h2 {
            s += &format!(" h2={h2}");
        }
        s
    }

    fn build(&self, field: &PrimeField, seed: u64) -> Result<[FnTable; 4]> {
        let g1 = self.g1.build(field, seed, 4)?;
        let h1 = self.h1.build(field, seed, 5)?;
        let g2 = match &self.g2 {
            Some(s) => s.build(field, seed, 6)?,
            None => g1.clone(),
        };
        let h2 = match &self.h2 {
            Some(s) => s.build(field, seed, 7)?,
            None => h1.clone(),
        };
        Ok([g1, h1, g2, h2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    LemmaSum,
    LemmaProd,
    NChain,
    Composite,
    Phi,
}

fn default_functions() -> Vec<FnSet> {
    vec![FnSet::default()]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    pub families: Vec<FamilyKind>,
    pub sizes: Vec<SizeSpec>,
    #[serde(default)]
    pub seeds: SeedRange,
    #[serde(default = "default_functions")]
    pub functions: Vec<FnSet>,
    #[serde(default)]
    pub theorems: Vec<TheoremId>,
    #[serde(default)]
    pub chains: Vec<ChainKind>,
    #[serde(default)]
    pub k: KChoice,
    /// Popularity parameter for the `phi` chain; `1/log₂|C|` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub caps: Caps,
    /// Adds wall-clock timings to chain reports. Timings differ between
    /// runs, so reports are then no longer byte-reproducible.
    #[serde(default)]
    pub record_timing: bool,
}

/// Distribution of ratios for one theorem row name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremAgg {
    pub rows: u64,
    pub hyp_ok_rows: u64,
    pub min_ratio: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
    /// Rows whose exact comparison failed (explicit-constant results only).
    pub exact_failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRef {
    pub instance: u64,
    pub chain: String,
    pub check: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub instances: u64,
    pub exact_checks: u64,
    pub exact_failures: u64,
    pub failures: Vec<FailureRef>,
    pub theorems: BTreeMap<String, TheoremAgg>,
}

/// A chain or theorem that could not be evaluated on an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepError {
    pub instance: u64,
    pub what: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: SweepConfig,
    pub rows: Vec<RatioRow>,
    pub chains: Vec<ChainReport>,
    pub errors: Vec<SweepError>,
    pub aggregates: Aggregates,
}

impl Report {
    /// True when some exact check failed.
    pub fn has_exact_failure(&self) -> bool {
        self.aggregates.exact_failures > 0
    }
}

#[derive(Clone, Debug)]
struct InstanceDesc {
    id: u64,
    field: PrimeField,
    family: FamilyKind,
    sizes: [usize; 4],
    fns: usize,
    seed: u64,
}

#[derive(Default)]
struct InstanceOut {
    rows: Vec<RatioRow>,
    chains: Vec<ChainReport>,
    errors: Vec<SweepError>,
}

fn validate(cfg: &SweepConfig, cap: u64) -> Result<Vec<PrimeField>> {
    if cfg.seeds.end < cfg.seeds.start {
        return Err(Error::Config(format!(
            "seed range {}..{} is reversed",
            cfg.seeds.start, cfg.seeds.end
        )));
    }
    if let Some(e) = cfg.epsilon {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1), got {e}"
            )));
        }
    }
    for s in &cfg.sizes {
        if s.resolve().contains(&0) {
            return Err(Error::Config("set sizes must be positive".into()));
        }
    }
    cfg.primes
        .iter()
        .map(|&p| {
            PrimeField::with_cap(p, cap).map_err(|e| Error::Config(format!("prime {p}: {e}")))
        })
        .collect()
}

fn instances(cfg: &SweepConfig, fields: &[PrimeField]) -> Vec<InstanceDesc> {
    let mut out = Vec::new();
    for field in fields {
        for &family in &cfg.families {
            for size in &cfg.sizes {
                for fns in 0..cfg.functions.len() {
                    for seed in cfg.seeds.start..cfg.seeds.end {
                        out.push(InstanceDesc {
                            id: out.len() as u64,
                            field: field.clone(),
                            family,
                            sizes: size.resolve(),
                            fns,
                            seed,
                        });
                    }
                }
            }
        }
    }
    out
}

fn evaluate(cfg: &SweepConfig, inst: &InstanceDesc) -> Result<InstanceOut> {
    let field = &inst.field;
    let mut sets = Vec::with_capacity(4);
    for (role, &n) in inst.sizes.iter().enumerate() {
        let set = inst
            .family
            .build(field, n, inst.seed, role as u64)
            .map_err(|e| Error::Config(format!("instance {}: {e}", inst.id)))?;
        sets.push(set);
    }
    let [a, b, c, d]: [FSet; 4] = sets.try_into().expect("four roles");
    let fnset = &cfg.functions[inst.fns];
    let [g1, h1, g2, h2] = fnset
        .build(field, inst.seed)
        .map_err(|e| Error::Config(format!("instance {}: {e}", inst.id)))?;
    let descriptor = json!({
        "id": inst.id,
        "p": field.p(),
        "family": inst.family.label(),
        "seed": inst.seed,
        "functions": fnset.label(),
    });
    let mut out = InstanceOut::default();
    let record_error = |out: &mut InstanceOut, what: &str, e: Error| {
        out.errors.push(SweepError {
            instance: inst.id,
            what: what.to_string(),
            error: e.to_string(),
        })
    };

    let tinst = TheoremInstance {
        family: inst.family.label().to_string(),
        seed: inst.seed,
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        d,
        g1: g1.clone(),
        h1: h1.clone(),
        g2,
        h2,
    };
    for &id in &cfg.theorems {
        match theorem_ratio(id, &tinst) {
            Ok(rows) => out.rows.extend(rows),
            Err(e) => record_error(&mut out, id.label(), e),
        }
    }

    for &kind in &cfg.chains {
        let start = Instant::now();
        let result = match kind {
            ChainKind::LemmaSum => {
                lemma_chain_check(&a, &b, &c, &g1, &h1, LemmaKind::Sum, cfg.k, cfg.caps)
            }
            ChainKind::LemmaProd => {
                lemma_chain_check(&a, &b, &c, &g1, &h1, LemmaKind::Prod, cfg.k, cfg.caps)
            }
            ChainKind::NChain => n_chain_check(&a, &b, &c, &g1, &h1),
            ChainKind::Composite => composite_n_check(&b, &c),
            ChainKind::Phi => phi_chain(&b, &c, cfg.epsilon),
        };
        let label = serde_json::to_value(kind)?
            .as_str()
            .unwrap_or_default()
            .to_string();
        match result {
            Ok(mut rep) => {
                let mut merged = descriptor.clone();
                if let (Some(m), Some(extra)) = (merged.as_object_mut(), rep.instance.as_object()) {
                    for (k, v) in extra {
                        m.entry(k.clone()).or_insert_with(|| v.clone());
                    }
                }
                rep.instance = merged;
                if cfg.record_timing {
                    rep.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                }
                out.chains.push(rep);
            }
            Err(e) => {
                out.chains.push(ChainReport::skipped(
                    &label,
                    descriptor.clone(),
                    e.to_string(),
                ));
            }
        }
    }
    Ok(out)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn aggregate(instances: u64, rows: &[RatioRow], chains: &[ChainReport]) -> Aggregates {
    let mut agg = Aggregates {
        instances,
        ..Default::default()
    };
    for rep in chains {
        let id = rep.instance.get("id").and_then(|v| v.as_u64()).unwrap_or(0);
        for c in &rep.checks {
            if c.kind == super::CheckKind::Exact {
                agg.exact_checks += 1;
                if !c.pass {
                    agg.exact_failures += 1;
                    agg.failures.push(FailureRef {
                        instance: id,
                        chain: rep.chain.clone(),
                        check: c.name.clone(),
                    });
                }
            }
        }
    }
    let mut by_name: BTreeMap<&str, Vec<&RatioRow>> = BTreeMap::new();
    for r in rows {
        by_name.entry(&r.theorem).or_default().push(r);
        if let Some(pass) = r.exact_pass {
            agg.exact_checks += 1;
            if !pass {
                agg.exact_failures += 1;
            }
        }
    }
    for (name, rs) in by_name {
        let mut ratios: Vec<f64> = rs.iter().map(|r| r.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        agg.theorems.insert(
            name.to_string(),
            TheoremAgg {
                rows: rs.len() as u64,
                hyp_ok_rows: rs.iter().filter(|r| r.hyp_ok).count() as u64,
                min_ratio: ratios[0],
                median_ratio: median(&ratios),
                max_ratio: ratios[ratios.len() - 1],
                exact_failures: rs.iter().filter(|r| r.exact_pass == Some(false)).count() as u64,
            },
        );
    }
    agg
}

/// Runs the grid on `workers` threads. `cap` bounds the primes.
pub fn run_sweep(cfg: &SweepConfig, workers: usize, cap: u64) -> Result<Report> {
    let fields = validate(cfg, cap)?;
    let grid = instances(cfg, &fields);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outs: Vec<InstanceOut> = pool.install(|| {
        grid.par_iter()
            .map(|inst| evaluate(cfg, inst))
            .collect::<Result<_>>()
    })?;
    let mut rows = Vec::new();
    let mut chains = Vec::new();
    let mut errors = Vec::new();
    for o in outs {
        rows.extend(o.rows);
        chains.extend(o.chains);
        errors.extend(o.errors);
    }
    let aggregates = aggregate(grid.len() as u64, &rows, &chains);
    Ok(Report {
        config: cfg.clone(),
        rows,
        chains,
        errors,
        aggregates,
    })
}
