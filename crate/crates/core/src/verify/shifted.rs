//! The counting chain around `b - c = (a - c) - (a - b) = (d - c) - (d - b)`
//! with popular differences `a - c, d - c ∈ P`.

use serde_json::json;

use super::{big, ChainReport, Check, Relation};
use crate::energy::{dyadic_buckets, moment_int, popular_from, rep_fn, RepKind};
use crate::error::{check_same, Error, Result};
use crate::functions::{f_image, mu, FnTable};
use crate::sets::{combine, FSet, SetOp};
use crate::Method;

/// Largest `|P|` and `|B-B|` for which [`count_x_brute`] runs.
pub const BRUTE_X_MAX: usize = 60;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NShifted {
    /// Solutions `(a, b, c, d) ∈ B × B × C × B` with `a - c, d - c ∈ P`.
    pub n: u128,
    /// `Σ_c n(c)`, where `n(c) = |{a ∈ B : a - c ∈ P}|`.
    pub mass: u64,
    /// `n(c)` in increasing order of `c`.
    pub per_c: Vec<u64>,
}

/// `N = |B| Σ_{c ∈ C} n(c)²`.
pub fn count_n_shifted(b: &FSet, c: &FSet, p_set: &FSet) -> Result<NShifted> {
    check_same(b.p(), c.p())?;
    check_same(b.p(), p_set.p())?;
    if !p_set.is_subset(&combine(b, c, SetOp::Diff)?) {
        return Err(Error::BadP);
    }
    // n(c) = |{(a, x) ∈ B × P : a - x = c}|
    let r = rep_fn(b, p_set, RepKind::Difference, Method::Auto)?;
    let per_c: Vec<u64> = c.iter().map(|v| r.count(v)).collect();
    let mass = per_c.iter().sum();
    let sq: u128 = per_c.iter().map(|&v| (v as u128).pow(2)).sum();
    Ok(NShifted {
        n: b.len() as u128 * sq,
        mass,
        per_c,
    })
}

/// `|{(x, y, u, v) ∈ P² × D² : x - u = y - v}|` with `D = B - B` as a set,
/// i.e. `Σ_w r_{P-D}(w)²`.
pub fn count_x(p_set: &FSet, b: &FSet) -> Result<u128> {
    check_same(p_set.p(), b.p())?;
    let d = combine(b, b, SetOp::Diff)?;
    let r = rep_fn(p_set, &d, RepKind::Difference, Method::Auto)?;
    Ok(moment_int(&r, 2))
}

/// [`count_x`] by enumerating pairs of pairs; `|P|, |B-B| <= BRUTE_X_MAX`.
pub fn count_x_brute(p_set: &FSet, b: &FSet) -> Result<u128> {
    check_same(p_set.p(), b.p())?;
    let d = combine(b, b, SetOp::Diff)?;
    if p_set.len() > BRUTE_X_MAX || d.len() > BRUTE_X_MAX {
        return Err(Error::SizeCap(format!(
            "quadruple enumeration needs |P|, |B-B| <= {BRUTE_X_MAX} (got {}, {})",
            p_set.len(),
            d.len()
        )));
    }
    let f = b.field();
    let (ps, ds) = (p_set.elements(), d.elements());
    let mut count = 0u128;
    for &x in &ps {
        for &u in &ds {
            let w = f.sub(x, u);
            for &y in &ps {
                for &v in &ds {
                    if f.sub(y, v) == w {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Both sides of `Σ_x r_{B-B}(x)³ r_{C-C}(x) <= E_4(B)^{3/4} E_4(C)^{1/4}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Holder {
    pub lhs: u128,
    pub e4_b: u128,
    pub e4_c: u128,
    /// `E_4(B)^{3/4} E_4(C)^{1/4}` in floating point, for display.
    pub rhs: f64,
    /// `lhs⁴ <= E_4(B)³ E_4(C)`, decided on integers.
    pub holds: bool,
}

pub fn holder_weighted_sum(b: &FSet, c: &FSet) -> Result<Holder> {
    check_same(b.p(), c.p())?;
    let rb = rep_fn(b, b, RepKind::Difference, Method::Auto)?;
    let rc = rep_fn(c, c, RepKind::Difference, Method::Auto)?;
    let lhs: u128 = rb
        .nonzero()
        .map(|(x, v)| (v as u128).pow(3) * rc.count(x) as u128)
        .sum();
    let (e4_b, e4_c) = (moment_int(&rb, 4), moment_int(&rc, 4));
    let rhs = (e4_b as f64).powf(0.75) * (e4_c as f64).powf(0.25);
    let holds = big(lhs).pow(4) <= big(e4_b).pow(3) * big(e4_c);
    Ok(Holder {
        lhs,
        e4_b,
        e4_c,
        rhs,
        holds,
    })
}

fn sizes(b: &FSet, c: &FSet) -> serde_json::Value {
    json!({ "p": b.p(), "|B|": b.len(), "|C|": c.len() })
}

/// `N² <= X·Σ r³_{B-B} r_{C-C}` with `P = popular_diff(B, C)`, together with
/// the Hölder step and their combination `N⁸ <= E_4(B)³E_4(C)X⁴`.
pub fn composite_n_check(b: &FSet, c: &FSet) -> Result<ChainReport> {
    check_same(b.p(), c.p())?;
    if b.is_empty() || c.is_empty() {
        return Err(Error::EmptySet);
    }
    let r = rep_fn(b, c, RepKind::Difference, Method::Auto)?;
    let p_set = popular_from(&r);
    let ns = count_n_shifted(b, c, &p_set)?;
    let x = count_x(&p_set, b)?;
    let hol = holder_weighted_sum(b, c)?;
    let d = combine(b, b, SetOp::Diff)?;
    let n2 = big(ns.n) * big(ns.n);
    let mut checks = vec![
        Check::exact(
            "N^2 <= X*sum r^3_{B-B} r_{C-C}",
            n2.clone(),
            Relation::Le,
            big(x) * big(hol.lhs),
        ),
        Check::exact(
            "(sum r^3_{B-B} r_{C-C})^4 <= E4(B)^3 E4(C)",
            big(hol.lhs).pow(4),
            Relation::Le,
            big(hol.e4_b).pow(3) * big(hol.e4_c),
        ),
        Check::exact(
            "N^8 <= E4(B)^3 E4(C) X^4",
            n2.pow(4),
            Relation::Le,
            big(hol.e4_b).pow(3) * big(hol.e4_c) * big(x).pow(4),
        ),
        Check::exact(
            "X >= |P||B-B|",
            x,
            Relation::Ge,
            p_set.len() as u128 * d.len() as u128,
        ),
        Check::report(
            "sum r^3_{B-B} r_{C-C} vs E4(B)^(3/4) E4(C)^(1/4)",
            hol.lhs,
            Relation::Le,
            hol.rhs,
        ),
    ];
    if b == c {
        checks.push(Check::exact(
            "Holder equality when B = C",
            hol.lhs,
            Relation::Eq,
            hol.e4_b,
        ));
    }
    if p_set.len() <= BRUTE_X_MAX && d.len() <= BRUTE_X_MAX {
        checks.push(Check::exact(
            "X == quadruple enumeration",
            x,
            Relation::Eq,
            count_x_brute(&p_set, b)?,
        ));
    }
    let mut inst = sizes(b, c);
    inst["|P|"] = json!(p_set.len());
    inst["N"] = json!(ns.n.to_string());
    inst["X"] = json!(x.to_string());
    Ok(ChainReport::new("composite", inst, checks))
}

/// `Σ_t W(t)²` with `W(t) = |{(a, F, d) ∈ A × f(A,B) × (B-C) : F/g(a) - h(a) - d = t}|`.
pub fn sextuple_count(a: &FSet, b: &FSet, c: &FSet, g: &FnTable, h: &FnTable) -> Result<u128> {
    let f = a.field();
    let image = f_image(g, h, a, b)?;
    let d = combine(b, c, SetOp::Diff)?;
    let mut hist = vec![0u64; f.p() as usize];
    for ai in a.iter() {
        let gi = f.inverse(g.get(ai))?;
        let ha = h.get(ai);
        for v in image.iter() {
            hist[f.sub(f.mul(v, gi), ha) as usize] += 1;
        }
    }
    let mut w = vec![0u64; f.p() as usize];
    let ds = d.elements();
    for (u, &cnt) in hist.iter().enumerate().filter(|(_, &c)| c > 0) {
        for &dv in &ds {
            w[f.sub(u as u64, dv) as usize] += cnt;
        }
    }
    Ok(w.iter().map(|&v| (v as u128).pow(2)).sum())
}

/// The exact steps of the popular-difference argument on one instance:
/// popularity mass, the Cauchy–Schwarz lower bounds on `N`, the collision
/// count `|A|²E⁺(B, B-C) <= S₆`, and the dyadic-bucket bounds for
/// `r_{B-(B-C)}`. The literal `|P|²|B|/|C|` bound and the final `E⁺` bound
/// are report rows.
pub fn n_chain_check(
    a: &FSet,
    b: &FSet,
    c: &FSet,
    g: &FnTable,
    h: &FnTable,
) -> Result<ChainReport> {
    check_same(a.p(), b.p())?;
    check_same(a.p(), c.p())?;
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(Error::EmptySet);
    }
    let (nb, nc, na) = (b.len() as u128, c.len() as u128, a.len() as u128);
    let r = rep_fn(b, c, RepKind::Difference, Method::Auto)?;
    let p_set = popular_from(&r);
    let pop_mass: u64 = p_set.iter().map(|x| r.count(x)).sum();
    let ns = count_n_shifted(b, c, &p_set)?;
    let mass = ns.mass as u128;

    let bc = combine(b, c, SetOp::Diff)?;
    let r_plus = rep_fn(b, &bc, RepKind::Difference, Method::Auto)?;
    let e_plus = moment_int(&r_plus, 2);
    let s6 = sextuple_count(a, b, c, g, h)?;
    let buckets = dyadic_buckets(&r_plus);
    let max_td = buckets.iter().map(|t| t.size_delta()).max().unwrap_or(0);
    let max_td2 = buckets.iter().map(|t| t.size_delta_sq()).max().unwrap_or(0);
    let m = mu(g, None)?;
    let image = f_image(g, h, a, b)?;

    let checks = vec![
        Check::exact(
            "2*mass(P) >= |B||C|",
            2 * pop_mass as u128,
            Relation::Ge,
            nb * nc,
        ),
        Check::exact("sum_c n(c) == mass(P)", ns.mass, Relation::Eq, pop_mass),
        Check::exact(
            "N|C| >= mass^2 |B|",
            big(ns.n) * big(nc),
            Relation::Ge,
            big(mass).pow(2) * big(nb),
        ),
        Check::exact(
            "4N >= |B|^3 |C|",
            big(ns.n) * 4u32,
            Relation::Ge,
            big(nb).pow(3) * big(nc),
        ),
        Check::report(
            "N vs |P|^2 |B| / |C|",
            ns.n,
            Relation::Ge,
            (p_set.len() as f64).powi(2) * nb as f64 / nc as f64,
        ),
        Check::exact(
            "|A|^2 E+(B,B-C) <= S6",
            big(na).pow(2) * big(e_plus),
            Relation::Le,
            s6,
        ),
        Check::exact(
            "max |T|Delta <= |B||B-C|",
            max_td,
            Relation::Le,
            nb * bc.len() as u128,
        ),
        Check::exact("max |T|Delta^2 <= E+(B,B-C)", max_td2, Relation::Le, e_plus),
        Check::report(
            "E+(B,B-C) vs m^2 |f(A,B)|^(3/2) |A|^(-1/2) |B-C|^(3/2)",
            e_plus,
            Relation::Le,
            (m as f64).powi(2) * (image.len() as f64).powf(1.5) / (na as f64).sqrt()
                * (bc.len() as f64).powf(1.5),
        ),
    ];
    let mut inst = sizes(b, c);
    inst["|A|"] = json!(a.len());
    inst["|P|"] = json!(p_set.len());
    inst["m"] = json!(m);
    Ok(ChainReport::new("n_chain", inst, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::popular_diff;
    use crate::field::PrimeField;
    use crate::functions::{make_fn, FnSpec};
    use crate::rng::{sample_subset, stream_rng};
    use proptest::prelude::*;

    fn set(f: &PrimeField, xs: impl IntoIterator<Item = u64>) -> FSet {
        FSet::from_elements(f, xs).unwrap()
    }

    fn brute_n(b: &FSet, c: &FSet, p_set: &FSet) -> u128 {
        let f = b.field();
        let mut n = 0;
        for a in b.iter() {
            for _ in b.iter() {
                for cv in c.iter() {
                    for d in b.iter() {
                        if p_set.contains(f.sub(a, cv)) && p_set.contains(f.sub(d, cv)) {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    fn brute_sextuples(a: &FSet, b: &FSet, c: &FSet, g: &FnTable, h: &FnTable) -> u128 {
        let f = a.field();
        let image = f_image(g, h, a, b).unwrap();
        let d = combine(b, c, SetOp::Diff).unwrap();
        let mut vals = Vec::new();
        for ai in a.iter() {
            for v in image.iter() {
                for dv in d.iter() {
                    let u = f.sub(f.div(v, g.get(ai)).unwrap(), h.get(ai));
                    vals.push(f.sub(u, dv));
                }
            }
        }
        let mut n = 0;
        for x in &vals {
            n += vals.iter().filter(|&y| y == x).count() as u128;
        }
        n
    }

    fn random_set(f: &PrimeField, seed: u64, id: u64, n: usize) -> FSet {
        let mut rng = stream_rng(seed, id);
        set(f, sample_subset(&mut rng, 1, f.p(), n))
    }

    #[test]
    fn documented_examples() {
        let f7 = PrimeField::new(7).unwrap();
        let b = set(&f7, [1, 2, 3]);
        let p = popular_diff(&b, &b).unwrap();
        let ns = count_n_shifted(&b, &b, &p).unwrap();
        assert_eq!((ns.n, ns.mass), (81, 9));
        assert_eq!(ns.per_c, vec![3, 3, 3]);
        assert_eq!(count_n_shifted(&b, &b, &FSet::empty(&f7)).unwrap().n, 0);
        let s = set(&f7, [4]);
        let ns = count_n_shifted(&s, &s, &set(&f7, [0])).unwrap();
        assert_eq!((ns.n, ns.mass), (1, 1));
        assert!(matches!(
            count_n_shifted(&s, &s, &set(&f7, [1])),
            Err(Error::BadP)
        ));

        assert_eq!(count_x(&set(&f7, [0]), &s).unwrap(), 1);
        assert_eq!(count_x(&p, &b).unwrap(), count_x_brute(&p, &b).unwrap());

        let c = set(&f7, [1, 2, 4]);
        let hol = holder_weighted_sum(&b, &c).unwrap();
        assert!(hol.holds && (hol.lhs as f64) <= hol.rhs);
        let same = holder_weighted_sum(&b, &b).unwrap();
        assert_eq!(same.lhs, same.e4_b);
        assert!(same.holds);
        let single = holder_weighted_sum(&s, &c).unwrap();
        assert_eq!(single.lhs, 3);
        assert!(single.holds);

        let rep = composite_n_check(&b, &b).unwrap();
        assert!(rep.passed());
        let rep = composite_n_check(&s, &s).unwrap();
        assert!(rep.passed());
        let c0 = rep.check("N^2 <= X*sum r^3_{B-B} r_{C-C}").unwrap();
        assert_eq!((c0.lhs.clone(), c0.rhs.clone()), (1u64.into(), 1u64.into()));
    }

    #[test]
    fn composite_on_random_instances() {
        let f = PrimeField::new(101).unwrap();
        for seed in 0..30 {
            let b = random_set(&f, seed, 1, 10);
            let c = random_set(&f, seed, 2, 10);
            let rep = composite_n_check(&b, &c).unwrap();
            assert!(
                rep.passed(),
                "seed {seed}: {:?}",
                rep.failures().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn n_chain_on_intervals() {
        let f = PrimeField::new(101).unwrap();
        let s = set(&f, 1..11);
        let id = make_fn(&f, &FnSpec::Identity).unwrap();
        let one = make_fn(&f, &FnSpec::Const(1)).unwrap();
        let rep = n_chain_check(&s, &s, &s, &id, &one).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn counts_match_enumeration(seed in 0u64..10_000, nb in 1usize..7, nc in 1usize..7) {
            let f = PrimeField::new(31).unwrap();
            let a = random_set(&f, seed, 0, nb.min(4));
            let b = random_set(&f, seed, 1, nb);
            let c = random_set(&f, seed, 2, nc);
            let p = popular_diff(&b, &c).unwrap();
            let ns = count_n_shifted(&b, &c, &p).unwrap();
            prop_assert_eq!(ns.n, brute_n(&b, &c, &p));
            // Cauchy–Schwarz equality iff n(c) is constant
            let eq = ns.n * c.len() as u128 == (ns.mass as u128).pow(2) * b.len() as u128;
            let constant = ns.per_c.windows(2).all(|w| w[0] == w[1]);
            prop_assert_eq!(eq, constant);
            prop_assert_eq!(count_x(&p, &b).unwrap(), count_x_brute(&p, &b).unwrap());
            let g = FnSpec::Random(None).build(&f, seed, 4).unwrap();
            let h = FnSpec::Random(None).build(&f, seed, 5).unwrap();
            prop_assert_eq!(sextuple_count(&a, &b, &c, &g, &h).unwrap(), brute_sextuples(&a, &b, &c, &g, &h));
            let rep = n_chain_check(&a, &b, &c, &g, &h).unwrap();
            prop_assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
            let rep = composite_n_check(&b, &c).unwrap();
            prop_assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        }
    }
}
