//! Ratio rows for the sum-product theorems.
//!
//! Every row records the theorem's max-term (computed exactly from set
//! operations), its right-hand side with constants and logarithms dropped,
//! and whether the theorem's hypotheses hold on the instance. Only Vinh's
//! inequality has explicit constants and is decided exactly.

use std::io::Write;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::big;
use crate::error::{check_same, Error, Result};
use crate::functions::{f_image, mu, pointwise_product, FnSpec, FnTable};
use crate::sets::{combine, FSet, SetOp};

/// Header of the flat CSV ratio table.
pub const CSV_HEADER: &str = "theorem,p,family,seed,|A|,|B|,|C|,|D|,m,lhs,rhs,ratio,hyp_ok";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "HIS_1_1")]
    His11,
    #[serde(rename = "Vinh_1_2")]
    Vinh12,
    #[serde(rename = "HH_1_1")]
    Hh11,
    #[serde(rename = "HH_1_2")]
    Hh12,
    #[serde(rename = "PM_1_3")]
    Pm13,
    #[serde(rename = "PM_1_4")]
    Pm14,
    #[serde(rename = "T_1_5")]
    T15,
    #[serde(rename = "T_1_6")]
    T16,
    #[serde(rename = "Cor_1_7")]
    Cor17,
    #[serde(rename = "Cor_1_8")]
    Cor18,
    #[serde(rename = "T_1_9")]
    T19,
    #[serde(rename = "Cor_1_10")]
    Cor110,
    #[serde(rename = "Cor_1_11_Warren")]
    Cor111Warren,
    #[serde(rename = "Cor_mult")]
    CorMult,
    #[serde(rename = "T_1_12_threshold")]
    T112Threshold,
}

impl TheoremId {
    pub const ALL: [TheoremId; 15] = [
        TheoremId::His11,
        TheoremId::Vinh12,
        TheoremId::Hh11,
        TheoremId::Hh12,
        TheoremId::Pm13,
        TheoremId::Pm14,
        TheoremId::T15,
        TheoremId::T16,
        TheoremId::Cor17,
        TheoremId::Cor18,
        TheoremId::T19,
        TheoremId::Cor110,
        TheoremId::Cor111Warren,
        TheoremId::CorMult,
        TheoremId::T112Threshold,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TheoremId::His11 => "HIS_1_1",
            TheoremId::Vinh12 => "Vinh_1_2",
            TheoremId::Hh11 => "HH_1_1",
            TheoremId::Hh12 => "HH_1_2",
            TheoremId::Pm13 => "PM_1_3",
            TheoremId::Pm14 => "PM_1_4",
            TheoremId::T15 => "T_1_5",
            TheoremId::T16 => "T_1_6",
            TheoremId::Cor17 => "Cor_1_7",
            TheoremId::Cor18 => "Cor_1_8",
            TheoremId::T19 => "T_1_9",
            TheoremId::Cor110 => "Cor_1_10",
            TheoremId::Cor111Warren => "Cor_1_11_Warren",
            TheoremId::CorMult => "Cor_mult",
            TheoremId::T112Threshold => "T_1_12_threshold",
        }
    }

    /// Which of `A, B, C, D` the theorem reads.
    fn uses(self) -> [bool; 4] {
        match self {
            TheoremId::His11
            | TheoremId::Vinh12
            | TheoremId::Cor17
            | TheoremId::Cor110
            | TheoremId::T112Threshold => [true, false, false, false],
            TheoremId::Hh11
            | TheoremId::Hh12
            | TheoremId::Pm13
            | TheoremId::Pm14
            | TheoremId::Cor18
            | TheoremId::CorMult => [true, true, true, false],
            TheoremId::T15 | TheoremId::T16 | TheoremId::T19 | TheoremId::Cor111Warren => [true; 4],
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown theorem id {s:?}")))
    }
}

/// Sets and functions for one evaluation. `f₁ = g₁(x)(h₁(x) + y)` acts on
/// `(A, B)` and `f₂` on `(D, C)`; single-function results use `f₁`.
#[derive(Clone, Debug)]
pub struct TheoremInstance {
    pub family: String,
    pub seed: u64,
    pub a: FSet,
    pub b: FSet,
    pub c: FSet,
    pub d: FSet,
    pub g1: FnTable,
    pub h1: FnTable,
    pub g2: FnTable,
    pub h2: FnTable,
}

impl TheoremInstance {
    /// `A = B = C = D` with `f₁ = f₂ = g(x)(h(x) + y)`.
    pub fn symmetric(family: &str, seed: u64, a: &FSet, g: &FnTable, h: &FnTable) -> Self {
        Self {
            family: family.to_string(),
            seed,
            a: a.clone(),
            b: a.clone(),
            c: a.clone(),
            d: a.clone(),
            g1: g.clone(),
            h1: h.clone(),
            g2: g.clone(),
            h2: h.clone(),
        }
    }

    fn p(&self) -> u64 {
        self.a.p()
    }
}

/// One theorem evaluated on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub theorem: String,
    pub p: u64,
    pub family: String,
    pub seed: u64,
    #[serde(rename = "|A|")]
    pub size_a: usize,
    #[serde(rename = "|B|")]
    pub size_b: Option<usize>,
    #[serde(rename = "|C|")]
    pub size_c: Option<usize>,
    #[serde(rename = "|D|")]
    pub size_d: Option<usize>,
    /// The multiplicity entering the bound, when there is one.
    pub m: Option<u64>,
    /// The theorem's max-term (for the two upper bounds, the left side).
    pub lhs: u128,
    pub rhs: f64,
    pub ratio: f64,
    pub hyp_ok: bool,
    /// Outcome of the exact comparison, for results with explicit constants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_pass: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

struct Ctx<'a> {
    inst: &'a TheoremInstance,
    p: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Ctx<'_> {
    fn row(
        &self,
        theorem: &str,
        uses: [bool; 4],
        m: Option<u64>,
        lhs: u128,
        rhs: f64,
        hyp_ok: bool,
    ) -> RatioRow {
        let i = self.inst;
        let size = |used: bool, s: &FSet| used.then_some(s.len());
        RatioRow {
            theorem: theorem.to_string(),
            p: i.p(),
            family: i.family.clone(),
            seed: i.seed,
            size_a: i.a.len(),
            size_b: size(uses[1], &i.b),
            size_c: size(uses[2], &i.c),
            size_d: size(uses[3], &i.d),
            m,
            lhs,
            rhs,
            ratio: lhs as f64 / rhs,
            hyp_ok,
            exact_pass: None,
            note: None,
        }
    }
}

fn card(s: &FSet) -> u128 {
    s.len() as u128
}

fn op(x: &FSet, y: &FSet, o: SetOp) -> Result<u128> {
    Ok(card(&combine(x, y, o)?))
}

/// `n <= p^{num/den}`, decided as `n^den <= p^num`.
fn le_root(n: usize, p: u64, num: u32, den: u32) -> bool {
    BigUint::from(n).pow(den) <= BigUint::from(p).pow(num)
}

fn image(g: &FnTable, h: &FnTable, x: &FSet, y: &FSet) -> Result<u128> {
    Ok(card(&f_image(g, h, x, y)?))
}

/// Evaluates one theorem. Results with two readings (`Cor_1_7` and
/// `Cor_1_8` for `±`, `T_1_12_threshold` for the two thresholds) yield two
/// rows with suffixed names.
pub fn theorem_ratio(id: TheoremId, inst: &TheoremInstance) -> Result<Vec<RatioRow>> {
    let p = inst.p();
    for s in [&inst.b, &inst.c, &inst.d] {
        check_same(p, s.p())?;
    }
    for t in [&inst.g1, &inst.h1, &inst.g2, &inst.h2] {
        check_same(p, t.field().p())?;
    }
    let uses = id.uses();
    for (used, s) in uses.iter().zip([&inst.a, &inst.b, &inst.c, &inst.d]) {
        if *used && s.is_empty() {
            return Err(Error::EmptySet);
        }
    }
    let ctx = Ctx {
        inst,
        p: p as f64,
        a: inst.a.len() as f64,
        b: inst.b.len() as f64,
        c: inst.c.len() as f64,
        d: inst.d.len() as f64,
    };
    let (a, b, c, d) = (&inst.a, &inst.b, &inst.c, &inst.d);
    let zero_free = uses
        .iter()
        .zip([a, b, c, d])
        .all(|(used, s)| !used || !s.contains_zero());
    let f = a.field();
    let (na, nb, nc, nd) = (a.len(), b.len(), c.len(), d.len());
    let (af, bf, cf, df, pf) = (ctx.a, ctx.b, ctx.c, ctx.d, ctx.p);
    let mu_g = || -> Result<u64> { mu(&inst.g1, None) };
    let mu_gh = || -> Result<u64> { mu(&pointwise_product(&inst.g1, &inst.h1)?, None) };
    let four_set_hyp =
        zero_free && na <= nb && le_root(nb, p, 3, 5) && nd <= nc && le_root(nc, p, 3, 5);
    let three_set_hyp =
        zero_free && na <= nb && na <= nc && le_root(nb, p, 3, 5) && le_root(nc, p, 3, 5);
    let one_set_hyp = zero_free && le_root(na, p, 3, 5);

    let rows = match id {
        TheoremId::His11 | TheoremId::Vinh12 => {
            let m = op(a, a, SetOp::Sum)?;
            let n = op(a, a, SetOp::Prod)?;
            let (mf, nf) = (m as f64, n as f64);
            let note = format!("|A+A|={m} |A*A|={n}");
            if id == TheoremId::His11 {
                let rhs = mf * mf * nf * af / pf + pf.sqrt() * mf * nf;
                vec![ctx.row(id.label(), uses, None, card(a).pow(3), rhs, true)]
            } else {
                let rhs = mf * nf * af / pf + pf.sqrt() * (mf * nf).sqrt();
                let mut row = ctx.row(id.label(), uses, None, card(a).pow(2), rhs, true);
                // p|A|² - mn|A| <= p^{3/2}(mn)^{1/2}, squared when positive
                let lhs = big(p as u128) * big(card(a)).pow(2);
                let sub = big(m) * big(n) * big(card(a));
                let pass = lhs <= sub || {
                    let l = lhs - sub;
                    l.pow(2) <= big(p as u128).pow(3) * big(m) * big(n)
                };
                row.exact_pass = Some(pass);
                vec![row]
            }
            .into_iter()
            .map(|mut r| {
                r.note = Some(note.clone());
                r
            })
            .collect()
        }
        TheoremId::Hh11 | TheoremId::Hh12 => {
            let (m, other) = if id == TheoremId::Hh11 {
                (mu_gh()?, op(b, c, SetOp::Prod)?)
            } else {
                (mu_g()?, op(b, c, SetOp::Sum)?)
            };
            let mf = m as f64;
            let lhs = image(&inst.g1, &inst.h1, a, b)? * other;
            let rhs = (af * bf * bf * cf / (pf * mf * mf)).min(pf * bf / mf);
            vec![ctx.row(id.label(), uses, Some(m), lhs, rhs, zero_free)]
        }
        TheoremId::Pm13 | TheoremId::Pm14 => {
            let (m, other) = if id == TheoremId::Pm13 {
                (mu_gh()?, op(b, c, SetOp::Prod)?)
            } else {
                (mu_g()?, op(b, c, SetOp::Sum)?)
            };
            let mf = m as f64;
            let lhs = image(&inst.g1, &inst.h1, a, b)?.max(other);
            let rhs = [
                af.powf(0.2) * bf.powf(0.8) * cf.powf(0.2) / mf.powf(0.8),
                bf * cf.sqrt() / mf,
                bf * af.sqrt() / mf,
                bf.powf(2.0 / 3.0) * cf.powf(1.0 / 3.0) * af.powf(1.0 / 3.0) / mf.powf(2.0 / 3.0),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            let hyp = zero_free && [na, nb, nc].iter().all(|&n| le_root(n, p, 5, 8));
            vec![ctx.row(id.label(), uses, Some(m), lhs, rhs, hyp)]
        }
        TheoremId::T15 | TheoremId::T16 | TheoremId::T19 | TheoremId::Cor111Warren => {
            let (g1, h1, g2, h2, m) = match id {
                TheoremId::Cor111Warren => {
                    let id_fn = FnSpec::Identity.build(f, 0, 0)?;
                    let one = FnSpec::Const(1).build(f, 0, 0)?;
                    let neg = FnSpec::Affine(p - 1, 0).build(f, 0, 0)?;
                    let minus_one = FnSpec::Const(p - 1).build(f, 0, 0)?;
                    (id_fn, one, neg, minus_one, None)
                }
                _ => {
                    let m = if id == TheoremId::T19 {
                        mu(&pointwise_product(&inst.g1, &inst.h1)?, None)?
                            .max(mu(&pointwise_product(&inst.g2, &inst.h2)?, None)?)
                    } else {
                        mu(&inst.g1, None)?.max(mu(&inst.g2, None)?)
                    };
                    (
                        inst.g1.clone(),
                        inst.h1.clone(),
                        inst.g2.clone(),
                        inst.h2.clone(),
                        Some(m),
                    )
                }
            };
            let set_op = match id {
                TheoremId::T15 => SetOp::Diff,
                TheoremId::T16 => SetOp::Sum,
                _ => SetOp::Prod,
            };
            let lhs = image(&g1, &h1, a, b)?
                .max(image(&g2, &h2, d, c)?)
                .max(op(b, c, set_op)?);
            let mf = m.unwrap_or(1) as f64;
            let rhs = if id == TheoremId::T15 {
                bf.powf(23.0 / 36.0)
                    * cf.powf(13.0 / 36.0)
                    * af.powf(7.0 / 36.0)
                    * df.powf(1.0 / 36.0)
                    / mf.powf(8.0 / 9.0)
            } else {
                cf.powf(5.0 / 18.0)
                    * bf.powf(13.0 / 18.0)
                    * af.powf(1.0 / 6.0)
                    * df.powf(1.0 / 18.0)
                    / mf.powf(8.0 / 9.0)
            };
            vec![ctx.row(id.label(), uses, m, lhs, rhs, four_set_hyp)]
        }
        TheoremId::Cor17 => {
            let m = mu_g()?;
            let fa = image(&inst.g1, &inst.h1, a, a)?;
            let rhs = af.powf(11.0 / 9.0);
            [("Cor_1_7:sum", SetOp::Sum), ("Cor_1_7:diff", SetOp::Diff)]
                .into_iter()
                .map(|(name, o)| {
                    Ok(ctx.row(name, uses, Some(m), fa.max(op(a, a, o)?), rhs, one_set_hyp))
                })
                .collect::<Result<_>>()?
        }
        TheoremId::Cor110 => {
            let m = mu_gh()?;
            let lhs = image(&inst.g1, &inst.h1, a, a)?.max(op(a, a, SetOp::Prod)?);
            vec![ctx.row(
                id.label(),
                uses,
                Some(m),
                lhs,
                af.powf(11.0 / 9.0),
                one_set_hyp,
            )]
        }
        TheoremId::Cor18 => {
            let m = mu_g()?;
            let mf = m as f64;
            let fab = image(&inst.g1, &inst.h1, a, b)?;
            let sum_rhs = bf.powf(13.0 / 18.0) * cf.powf(5.0 / 18.0) * af.powf(2.0 / 9.0)
                / mf.powf(8.0 / 9.0);
            let diff_rhs = bf.powf(23.0 / 36.0) * cf.powf(13.0 / 36.0) * af.powf(2.0 / 9.0)
                / mf.powf(8.0 / 9.0);
            vec![
                ctx.row(
                    "Cor_1_8:sum",
                    uses,
                    Some(m),
                    fab.max(op(b, c, SetOp::Sum)?),
                    sum_rhs,
                    three_set_hyp,
                ),
                ctx.row(
                    "Cor_1_8:diff",
                    uses,
                    Some(m),
                    fab.max(op(b, c, SetOp::Diff)?),
                    diff_rhs,
                    three_set_hyp,
                ),
            ]
        }
        TheoremId::CorMult => {
            let m = mu_gh()?;
            let mf = m as f64;
            let lhs = image(&inst.g1, &inst.h1, a, b)?.max(op(b, c, SetOp::Prod)?);
            let rhs = cf.powf(5.0 / 18.0) * bf.powf(13.0 / 18.0) * af.powf(2.0 / 9.0)
                / mf.powf(8.0 / 9.0);
            vec![ctx.row(id.label(), uses, Some(m), lhs, rhs, three_set_hyp)]
        }
        TheoremId::T112Threshold => {
            let m = mu_g()?;
            let fa = image(&inst.g1, &inst.h1, a, a)?;
            let small = op(a, a, SetOp::Sum)?.min(op(a, a, SetOp::Prod)?);
            let readings = [
                (
                    "T_1_12_threshold:stated",
                    6.0 / 5.0,
                    8.0 / 5.0 - 3.0 / 25.0,
                    2.0 / 5.0,
                ),
                ("T_1_12_threshold:proof", 9.0 / 8.0, 13.0 / 10.0, 4.0 / 5.0),
            ];
            readings
                .into_iter()
                .map(|(name, theta, base, slope)| {
                    // ε* is the largest ε with min{|A+A|, |A·A|} <= |A|^{θ-ε}
                    let eps = if na > 1 {
                        theta - (small as f64).ln() / af.ln()
                    } else {
                        0.0
                    };
                    let hyp = one_set_hyp && na > 1 && eps > 0.0;
                    let mut row =
                        ctx.row(name, uses, Some(m), fa, af.powf(base + slope * eps), hyp);
                    row.note = Some(format!("eps*={eps}"));
                    row
                })
                .collect()
        }
    };
    Ok(rows)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes rows as CSV with [`CSV_HEADER`].
pub fn write_rows_csv<W: Write>(out: W, rows: &[RatioRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            r.theorem.clone(),
            r.p.to_string(),
            r.family.clone(),
            r.seed.to_string(),
            r.size_a.to_string(),
            opt(r.size_b),
            opt(r.size_c),
            opt(r.size_d),
            opt(r.m),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.ratio.to_string(),
            r.hyp_ok.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
