//! The fourth-moment lemmas: `E_4(B, C)` (additive) and `E_4^×(B, C)`
//! (multiplicative) bounded through a level set, two Cauchy–Schwarz steps
//! and two point-plane incidence counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::quad::{quad_energy, solution_count_m, QuadVariant};
use super::{big, log2_floor2, ChainReport, Check, Relation};
use crate::energy::{dyadic_k_star, level_counts, level_set, moment_int, rep_fn, RepKind};
use crate::error::{check_same, Error, Result};
use crate::functions::{f_image, mu, pointwise_product, FnTable};
use crate::incidence::{max_collinear, proof_config, ProductConfig, ProofVariant};
use crate::sets::FSet;
use crate::Method;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// `r_{B-C}`, `f(a,b) = g(a)(h(a)+b)` matched against `x + c`.
    Sum,
    /// `r_{B/C}`, matched against `x·c`.
    Prod,
}

impl LemmaKind {
    pub fn label(self) -> &'static str {
        match self {
            LemmaKind::Sum => "sum",
            LemmaKind::Prod => "prod",
        }
    }
}

impl std::str::FromStr for LemmaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(LemmaKind::Sum),
            "prod" => Ok(LemmaKind::Prod),
            _ => Err(Error::BadParams(format!("unknown lemma kind {s:?}"))),
        }
    }
}

/// The level `k` defining `X_k = {x : r(x) >= k}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KChoice {
    /// The dyadic `k` maximizing `k⁴ n_k`, smallest on ties.
    #[default]
    Auto,
    Fixed(u64),
}

impl std::str::FromStr for KChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(KChoice::Auto);
        }
        match s.parse::<u64>() {
            Ok(k) if k >= 1 => Ok(KChoice::Fixed(k)),
            _ => Err(Error::BadParams(format!(
                "k must be `auto` or a positive integer, got {s:?}"
            ))),
        }
    }
}

impl Serialize for KChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KChoice::Auto => s.serialize_str("auto"),
            KChoice::Fixed(k) => s.serialize_u64(*k),
        }
    }
}

impl<'de> Deserialize<'de> for KChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) if k >= 1 => Ok(KChoice::Fixed(k)),
            Raw::Num(_) => Err(serde::de::Error::custom("k must be >= 1")),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Size limits for the histogram-based checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest `|A||X||third|` a quad energy may range over.
    pub max_triples: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_triples: 10_000_000,
        }
    }
}

/// `max(|U|, min(b_y, b_z))` where `b_y = max(#distinct y, largest column
/// count sharing one y)` and `b_z` likewise. A line that is not parallel to
/// the x-axis meets each column over its (y, z)-projection at most once,
/// and that projection either is a line `y = u` or meets every such line
/// once; the same holds for `z`.
fn covering_bound(pc: &ProductConfig) -> u64 {
    let mut by_y: BTreeMap<u64, u64> = BTreeMap::new();
    let mut by_z: BTreeMap<u64, u64> = BTreeMap::new();
    for &(y, z) in pc.columns() {
        *by_y.entry(y).or_default() += 1;
        *by_z.entry(z).or_default() += 1;
    }
    let bound =
        |m: &BTreeMap<u64, u64>| (m.len() as u64).max(m.values().copied().max().unwrap_or(0));
    (pc.x_values().len() as u64).max(bound(&by_y).min(bound(&by_z)))
}

/// Runs every step of the fourth-moment lemma of the given kind on one
/// instance.
///
/// Exact checks: `M >= k|A|n_k`; `M² <= |f(A,B)|·E₁` and `M² <= |C|·E₂`;
/// `E₁ <= m²I(R₁,S₁)` and `E₂ <= m²I(R₂,S₂)`; `p·E >= triples²` for both
/// quad energies; the collinearity bound `max(|A|,|C|,|X_k|)` and the
/// covering bound for `R₁`; the layer-cake identity for `E₄` and the dyadic
/// sandwich around `k⁴n_k`. Report rows: the lemma's final bound, the bound
/// for `E₄(B)` (both with the `log₂|A|` factor) and the incidence bound for
/// `(R₁, S₁)`.
#[allow(clippy::too_many_arguments)]
pub fn lemma_chain_check(
    a: &FSet,
    b: &FSet,
    c: &FSet,
    g: &FnTable,
    h: &FnTable,
    kind: LemmaKind,
    k: KChoice,
    caps: Caps,
) -> Result<ChainReport> {
    let field = a.field();
    for q in [b.p(), c.p(), g.field().p(), h.field().p()] {
        check_same(field.p(), q)?;
    }
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.len() > b.len() {
        return Err(Error::BadParams(format!(
            "the lemma needs |A| <= |B| (got {} > {})",
            a.len(),
            b.len()
        )));
    }
    let (rep_kind, v1, v2, p1, p2) = match kind {
        LemmaKind::Sum => (
            RepKind::Difference,
            QuadVariant::E1Sum,
            QuadVariant::E2Sum,
            ProofVariant::SumE1,
            ProofVariant::SumE2,
        ),
        LemmaKind::Prod => (
            RepKind::Ratio,
            QuadVariant::E3Prod,
            QuadVariant::E4Prod,
            ProofVariant::ProdE1,
            ProofVariant::ProdE2,
        ),
    };
    let r = rep_fn(b, c, rep_kind, Method::Auto)?;
    let level = match k {
        KChoice::Auto => dyadic_k_star(&r).ok_or(Error::EmptySet)?,
        KChoice::Fixed(k) => level_set(&r, k)?,
    };
    let x = &level.members;
    let image = f_image(g, h, a, b)?;
    // the second coordinate of R1 is g(a') for sums and g(a')h(a') for products
    let fiber_map = match kind {
        LemmaKind::Sum => g.clone(),
        LemmaKind::Prod => pointwise_product(g, h)?,
    };
    let m = mu(&fiber_map, None)?;
    let m_a = mu(&fiber_map, Some(a))?;
    let (na, nc, nf, nx) = (
        a.len() as u64,
        c.len() as u64,
        image.len() as u64,
        x.len() as u64,
    );
    for (label, third) in [(v1.label(), nc), (v2.label(), nf)] {
        let triples = na * nx * third;
        if triples > caps.max_triples {
            return Err(Error::SizeCap(format!(
                "{label} ranges over {triples} triples (cap {})",
                caps.max_triples
            )));
        }
    }

    let m_count = solution_count_m(a, b, c, x, kind == LemmaKind::Prod)?;
    let e1 = quad_energy(v1, a, x, c, g, h)?;
    let e2 = quad_energy(v2, a, x, &image, g, h)?;
    let pc1 = proof_config(p1, a, x, c, g, h)?;
    let pc2 = proof_config(p2, a, x, &image, g, h)?;
    let (i1, i2) = (pc1.incidences(), pc2.incidences());
    let collinear = max_collinear(field, &pc1.points())?;
    let e4 = moment_int(&r, 4);
    let m2 = (m as u128) * (m as u128);
    let p = field.p() as u128;
    let (e1n, e2n) = match kind {
        LemmaKind::Sum => ("E1", "E2"),
        LemmaKind::Prod => ("E3", "E4"),
    };

    let mut checks = vec![
        Check::exact(
            "M >= k|A|n_k",
            m_count,
            Relation::Ge,
            level.k as u128 * na as u128 * nx as u128,
        ),
        Check::exact(
            &format!("M^2 <= |f(A,B)|*{e1n}"),
            big(m_count) * big(m_count),
            Relation::Le,
            big(nf) * big(e1),
        ),
        Check::exact(
            &format!("M^2 <= |C|*{e2n}"),
            big(m_count) * big(m_count),
            Relation::Le,
            big(nc) * big(e2),
        ),
        Check::exact(
            &format!("{e1n} <= m^2*I(R1,S1)"),
            e1,
            Relation::Le,
            m2 * i1 as u128,
        ),
        Check::exact(
            &format!("{e2n} <= m^2*I(R2,S2)"),
            e2,
            Relation::Le,
            m2 * i2 as u128,
        ),
    ];
    for (name, e, third) in [(e1n, e1, nc), (e2n, e2, nf)] {
        let triples = (na * nx * third) as u128;
        checks.push(Check::exact(
            &format!("p*{name} >= triples^2"),
            big(p) * big(e),
            Relation::Ge,
            big(triples) * big(triples),
        ));
    }
    checks.push(Check::exact(
        "collinear(R1) <= max(|A|,|C|,|X_k|)",
        collinear,
        Relation::Le,
        na.max(nc).max(nx),
    ));
    checks.push(Check::exact(
        "collinear(R1) <= covering bound",
        collinear,
        Relation::Le,
        covering_bound(&pc1),
    ));

    let n = level_counts(&r);
    let layer_cake: u128 = (1..n.len())
        .map(|j| {
            let j = j as u128;
            n[j as usize] as u128 * (j.pow(4) - (j - 1).pow(4))
        })
        .sum();
    checks.push(Check::exact(
        "E4 == sum_k n_k (k^4 - (k-1)^4)",
        e4,
        Relation::Eq,
        layer_cake,
    ));
    let k4nk = (level.k as u128).pow(4) * nx as u128;
    checks.push(Check::exact("E4 >= k^4 n_k", e4, Relation::Ge, k4nk));
    if k == KChoice::Auto {
        let levels = 64 - (r.max_count()).leading_zeros() as u128;
        checks.push(Check::exact(
            "E4 <= 16 L k^4 n_k",
            e4,
            Relation::Le,
            16 * levels * k4nk,
        ));
    }

    let log_a = log2_floor2(a.len());
    let m4 = (m as f64).powi(4);
    let (ff, cf, af) = (nf as f64, nc as f64, na as f64);
    let lemma_rhs = m4 * (ff.powi(3) * cf.powi(2) / af).min(ff.powi(2) * cf.powi(3) / af) * log_a;
    checks.push(Check::report(
        "E4 vs lemma bound",
        e4,
        Relation::Le,
        lemma_rhs,
    ));
    let rb = rep_fn(b, b, rep_kind, Method::Auto)?;
    let e4b = moment_int(&rb, 4);
    let bf = b.len() as f64;
    checks.push(Check::report(
        "E4(B) vs m^4 |f(A,B)|^2 |B|^3 / |A|",
        e4b,
        Relation::Le,
        m4 * ff.powi(2) * bf.powi(3) / af * log_a,
    ));
    let (rn, sn) = (pc1.num_points(), pc1.num_planes());
    let rudnev = (rn as f64).sqrt() * sn as f64 + collinear as f64 * sn as f64;
    checks.push(
        Check::report("I(R1,S1) vs |R|^(1/2)|S| + k|S|", i1, Relation::Le, rudnev).with_note(
            format!(
                "|R|={rn} |S|={sn} |R|<=|S|:{} |R|<=p^2:{}",
                rn <= sn,
                rn as u128 <= p * p
            ),
        ),
    );

    let instance = json!({
        "kind": kind.label(),
        "p": field.p(),
        "|A|": na,
        "|B|": b.len(),
        "|C|": nc,
        "|f(A,B)|": nf,
        "k": level.k,
        "n_k": nx,
        "m": m,
        "m_A": m_a,
    });
    Ok(ChainReport::new(
        &format!("lemma_{}", kind.label()),
        instance,
        checks,
    ))
}
