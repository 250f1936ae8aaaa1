//! The quadruple energies behind the lemma chains and the solution counts
//! they bound.

use serde::{Deserialize, Serialize};

use crate::energy::{rep_fn, RepKind};
use crate::error::{check_same, Error, Result};
use crate::functions::FnTable;
use crate::sets::FSet;
use crate::Method;

/// Which value map is histogrammed. `third` is `C` for `E1Sum`/`E3Prod` and
/// the image `F = f(A, B)` for `E2Sum`/`E4Prod`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadVariant {
    /// `g(a)(x + c + h(a))` over `A × X × C`.
    #[serde(rename = "E1_sum")]
    E1Sum,
    /// `F/g(a) - x - h(a)` over `A × X × F`.
    #[serde(rename = "E2_sum")]
    E2Sum,
    /// `g(a)(x·c + h(a))` over `A × X × C`.
    #[serde(rename = "E3_prod")]
    E3Prod,
    /// `(F/g(a) - h(a)) / x` over `A × X × F`.
    #[serde(rename = "E4_prod")]
    E4Prod,
}

impl QuadVariant {
    pub fn label(self) -> &'static str {
        match self {
            QuadVariant::E1Sum => "E1_sum",
            QuadVariant::E2Sum => "E2_sum",
            QuadVariant::E3Prod => "E3_prod",
            QuadVariant::E4Prod => "E4_prod",
        }
    }
}

impl std::str::FromStr for QuadVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E1_sum" => Ok(QuadVariant::E1Sum),
            "E2_sum" => Ok(QuadVariant::E2Sum),
            "E3_prod" => Ok(QuadVariant::E3Prod),
            "E4_prod" => Ok(QuadVariant::E4Prod),
            _ => Err(Error::BadParams(format!(
                "unknown quad energy variant {s:?}"
            ))),
        }
    }
}

fn validate(
    variant: QuadVariant,
    a: &FSet,
    x: &FSet,
    third: &FSet,
    g: &FnTable,
    h: &FnTable,
) -> Result<()> {
    let p = a.p();
    for q in [x.p(), third.p(), g.field().p(), h.field().p()] {
        check_same(p, q)?;
    }
    if a.contains_zero() {
        return Err(Error::ZeroInA);
    }
    if variant == QuadVariant::E4Prod && x.contains_zero() {
        return Err(Error::ZeroDivisor);
    }
    Ok(())
}

/// `H(u) = |{(a, F) ∈ A × F : F/g(a) - h(a) = u}|`.
fn shifted_quotients(a: &FSet, image: &FSet, g: &FnTable, h: &FnTable) -> Vec<u64> {
    let f = a.field();
    let mut hist = vec![0u64; f.p() as usize];
    for ai in a.iter() {
        let gi = f.inverse(g.get(ai)).expect("g maps into F_p^*");
        let ha = h.get(ai);
        for v in image.iter() {
            hist[f.sub(f.mul(v, gi), ha) as usize] += 1;
        }
    }
    hist
}

/// Exact histogram `N_t` of the variant's value map over its index triples,
/// built from pair histograms without enumerating the triples.
pub fn quad_histogram(
    variant: QuadVariant,
    a: &FSet,
    x: &FSet,
    third: &FSet,
    g: &FnTable,
    h: &FnTable,
) -> Result<Vec<u64>> {
    validate(variant, a, x, third, g, h)?;
    let f = a.field();
    let p = f.p() as usize;
    let mut n = vec![0u64; p];
    match variant {
        QuadVariant::E1Sum | QuadVariant::E3Prod => {
            // S(s) = #{(x, c) : x ∘ c = s}; each a sends s to g(a)(s + h(a)).
            let s = if variant == QuadVariant::E1Sum {
                rep_fn(x, third, RepKind::Sum, Method::Auto)?
                    .counts()
                    .to_vec()
            } else {
                let mut s = rep_fn(
                    &x.without_zero(),
                    &third.without_zero(),
                    RepKind::Product,
                    Method::Auto,
                )?
                .counts()
                .to_vec();
                let nz = x.without_zero().len() as u64 * third.without_zero().len() as u64;
                s[0] += x.len() as u64 * third.len() as u64 - nz;
                s
            };
            let support: Vec<(u64, u64)> = s
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(v, &c)| (v as u64, c))
                .collect();
            for ai in a.iter() {
                let (ga, ha) = (g.get(ai), h.get(ai));
                for &(v, c) in &support {
                    n[f.mul(ga, f.add(v, ha)) as usize] += c;
                }
            }
        }
        QuadVariant::E2Sum | QuadVariant::E4Prod => {
            let hist = shifted_quotients(a, third, g, h);
            let xs = x.elements();
            let xinv: Vec<u64> = if variant == QuadVariant::E4Prod {
                xs.iter().map(|&v| f.inverse(v).expect("0 ∉ X")).collect()
            } else {
                Vec::new()
            };
            for (u, &c) in hist.iter().enumerate().filter(|(_, &c)| c > 0) {
                let u = u as u64;
                if variant == QuadVariant::E2Sum {
                    for &xv in &xs {
                        n[f.sub(u, xv) as usize] += c;
                    }
                } else {
                    for &xi in &xinv {
                        n[f.mul(u, xi) as usize] += c;
                    }
                }
            }
        }
    }
    Ok(n)
}

/// `Σ_t N_t²`, the number of pairs of triples with equal value.
pub fn quad_energy(
    variant: QuadVariant,
    a: &FSet,
    x: &FSet,
    third: &FSet,
    g: &FnTable,
    h: &FnTable,
) -> Result<u128> {
    let n = quad_histogram(variant, a, x, third, g, h)?;
    Ok(n.iter().map(|&c| (c as u128) * (c as u128)).sum())
}

/// Evaluates the value map on every triple and counts equal pairs by a
/// double loop. Meant for small instances (a few thousand triples).
pub fn quad_energy_brute(
    variant: QuadVariant,
    a: &FSet,
    x: &FSet,
    third: &FSet,
    g: &FnTable,
    h: &FnTable,
) -> Result<u128> {
    validate(variant, a, x, third, g, h)?;
    let f = a.field();
    let mut values = Vec::new();
    for ai in a.iter() {
        let (ga, ha) = (g.get(ai), h.get(ai));
        for xv in x.iter() {
            for t in third.iter() {
                let v = match variant {
                    QuadVariant::E1Sum => f.mul(ga, f.add(f.add(xv, t), ha)),
                    QuadVariant::E3Prod => f.mul(ga, f.add(f.mul(xv, t), ha)),
                    QuadVariant::E2Sum => f.sub(f.sub(f.div(t, ga)?, xv), ha),
                    QuadVariant::E4Prod => f.div(f.sub(f.div(t, ga)?, ha), xv)?,
                };
                values.push(v);
            }
        }
    }
    let mut pairs = 0u128;
    for v in &values {
        for w in &values {
            if v == w {
                pairs += 1;
            }
        }
    }
    Ok(pairs)
}

/// Solutions of `g(a)(x ∘ c + h(a)) = f(a, b)` over `A × B × C × X`, where
/// `∘` is `+` for the additive kind and `·` for the multiplicative one. The
/// equation reduces to `x ∘ c = b`, so the count is `|A| Σ_{x ∈ X} r(x)`
/// with `r = r_{B-C}` or `r_{B/C}`.
pub fn solution_count_m(
    a: &FSet,
    b: &FSet,
    c: &FSet,
    x: &FSet,
    multiplicative: bool,
) -> Result<u128> {
    for q in [b.p(), c.p(), x.p()] {
        check_same(a.p(), q)?;
    }
    if multiplicative && x.contains_zero() {
        return Err(Error::ZeroDivisor);
    }
    let kind = if multiplicative {
        RepKind::Ratio
    } else {
        RepKind::Difference
    };
    let r = rep_fn(b, c, kind, Method::Auto)?;
    let s: u128 = x.iter().map(|v| r.count(v) as u128).sum();
    Ok(a.len() as u128 * s)
}
