//! Solutions of `-c + b = (a + b) - (a + c) = (d + b) - (d + c)` with
//! popular sums and an energy-popular difference.

use serde_json::json;

use super::{big, ChainReport, Check, Relation};
use crate::energy::{energy_popular, moment, popular_sum_core, rep_fn, Exponent, RepKind};
use crate::error::{check_same, Error, Result};
use crate::sets::FSet;
use crate::Method;

/// Largest `|B|` and `|C|` accepted by [`phi_count`].
pub const PHI_MAX_SIZE: usize = 100;

/// `φ = |{(a, b, c, d) ∈ B × C × C × B : b - c ∈ P', a+b, a+c, d+c, d+b ∈ P}|`.
///
/// For fixed `(b, c)` the choices of `a` and `d` are independent and range
/// over the same set, so `φ = Σ_{b - c ∈ P'} n(b, c)²` with
/// `n(b, c) = |{a ∈ B : a + b, a + c ∈ P}|`.
pub fn phi_count(b: &FSet, c: &FSet, p_set: &FSet, p_prime: &FSet) -> Result<u128> {
    for q in [c.p(), p_set.p(), p_prime.p()] {
        check_same(b.p(), q)?;
    }
    if b.len() > PHI_MAX_SIZE || c.len() > PHI_MAX_SIZE {
        return Err(Error::SizeCap(format!(
            "phi enumeration needs |B|, |C| <= {PHI_MAX_SIZE} (got {}, {})",
            b.len(),
            c.len()
        )));
    }
    let f = b.field();
    let bs = b.elements();
    // hits[c] has bit i set when bs[i] + c ∈ P
    let hits: Vec<(u64, u128)> = c
        .iter()
        .map(|cv| {
            let mask = bs
                .iter()
                .enumerate()
                .filter(|(_, &a)| p_set.contains(f.add(a, cv)))
                .fold(0u128, |m, (i, _)| m | (1 << i));
            (cv, mask)
        })
        .collect();
    let mut phi = 0u128;
    for &(bv, mb) in &hits {
        for &(cv, mc) in &hits {
            if p_prime.contains(f.sub(bv, cv)) {
                phi += ((mb & mc).count_ones() as u128).pow(2);
            }
        }
    }
    Ok(phi)
}

/// The computable pieces of the popular-sum argument: `P` and `C'` from
/// [`popular_sum_core`], `P'` the dyadic bucket of `r_{C'-C'}` maximizing
/// `|P'|Δ'^{4/3}`, and `φ`. The one exact check is the trivial upper bound
/// `φ <= |B|² Σ_{x ∈ P'} r_{C-C}(x)`; the popularity statements, which
/// involve `ε`, are report rows.
pub fn phi_chain(b: &FSet, c: &FSet, epsilon: Option<f64>) -> Result<ChainReport> {
    check_same(b.p(), c.p())?;
    if b.is_empty() || c.is_empty() {
        return Err(Error::EmptySet);
    }
    let ps = popular_sum_core(c, epsilon)?;
    let eps = ps.epsilon;
    if ps.core.is_empty() {
        return Err(Error::BadParams("the popular core C' is empty".into()));
    }
    let four_thirds = Exponent::new(4, 3)?;
    let r_core = rep_fn(&ps.core, &ps.core, RepKind::Difference, Method::Auto)?;
    let bucket = energy_popular(&r_core, four_thirds)?;
    let phi = phi_count(b, c, &ps.popular, &bucket.members)?;
    let r_c = rep_fn(c, c, RepKind::Difference, Method::Auto)?;
    let pairs_in_p_prime: u128 = bucket.members.iter().map(|x| r_c.count(x) as u128).sum();
    let e43_core = moment(&r_core, four_thirds)?.as_f64();
    let e43 = moment(&r_c, four_thirds)?.as_f64();
    let (nb, nc) = (b.len() as f64, c.len() as f64);

    let checks = vec![
        Check::exact(
            "phi <= |B|^2 sum_{P'} r_{C-C}",
            phi,
            Relation::Le,
            big(b.len() as u128).pow(2) * big(pairs_in_p_prime),
        ),
        Check::report(
            "phi vs (1-4eps)|P'|Delta'|B|^2",
            phi,
            Relation::Ge,
            (1.0 - 4.0 * eps) * bucket.len() as f64 * bucket.delta as f64 * nb * nb,
        ),
        Check::report(
            "pairs in P vs (1-eps)|C|^2",
            ps.pairs_in_popular,
            Relation::Ge,
            (1.0 - eps) * nc * nc,
        ),
        Check::report(
            "|C'| vs (1-eps)|C|",
            ps.core.len(),
            Relation::Ge,
            (1.0 - eps) * nc,
        ),
        Check::report("E_{4/3}(C') vs E_{4/3}(C)", e43_core, Relation::Ge, e43),
        Check::report(
            "E_{4/3}(C') vs |P'|Delta'^(4/3)",
            e43_core,
            Relation::Ge,
            bucket.score(four_thirds),
        ),
    ];
    let inst = json!({
        "p": b.p(),
        "|B|": b.len(),
        "|C|": c.len(),
        "epsilon": eps,
        "|P|": ps.popular.len(),
        "|C'|": ps.core.len(),
        "|P'|": bucket.len(),
        "Delta'": bucket.delta,
        "phi": phi.to_string(),
    });
    Ok(ChainReport::new("phi", inst, checks))
}
