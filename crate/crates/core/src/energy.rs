//! Representation functions and everything derived from them: moment
//! energies, level sets, popular differences and sums, dyadic buckets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::conv::{cyclic, ConvMethod};
use crate::error::{check_same, Error, Result};
use crate::field::PrimeField;
use crate::sets::FSet;
use crate::Method;

/// Which pair statistic a [`RepFn`] counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    /// `b + c`
    Sum,
    /// `b - c`
    Difference,
    /// `b · c`, both sets inside F_p^*
    Product,
    /// `b · c⁻¹`, both sets inside F_p^*
    Ratio,
}

impl RepKind {
    fn multiplicative(self) -> bool {
        matches!(self, RepKind::Product | RepKind::Ratio)
    }
}

/// `x ↦ |{(b, c) ∈ B × C : b ∘ c = x}|`, stored densely over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepFn {
    kind: RepKind,
    field: PrimeField,
    counts: Vec<u64>,
    mass: u64,
}

impl RepFn {
    /// Wraps a dense histogram (length `p`).
    pub fn from_counts(field: &PrimeField, kind: RepKind, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), field.p() as usize);
        let mass = counts.iter().sum();
        Self {
            kind,
            field: field.clone(),
            counts,
            mass,
        }
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn count(&self, x: u64) -> u64 {
        self.counts[x as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of pairs, `|B||C|`.
    pub fn mass(&self) -> u64 {
        self.mass
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// `(value, count)` over the support, in increasing value order.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| (x as u64, c))
    }

    pub(crate) fn support_mask(&self) -> BitSet {
        let mut mask = BitSet::new(self.counts.len());
        for (x, _) in self.nonzero() {
            mask.insert(x as usize);
        }
        mask
    }

    /// The set of values with a positive count (`B ∘ C` as a set).
    pub fn support(&self) -> FSet {
        FSet::from_mask(&self.field, self.support_mask())
    }

    /// Values whose count satisfies `keep`.
    pub fn select(&self, mut keep: impl FnMut(u64) -> bool) -> FSet {
        let mut mask = BitSet::new(self.counts.len());
        for (x, c) in self.nonzero() {
            if keep(c) {
                mask.insert(x as usize);
            }
        }
        FSet::from_mask(&self.field, mask)
    }
}

/// Computes `r_{B∘C}` exactly.
///
/// The transform path convolves indicator vectors cyclically over `Z_p`
/// (additive kinds) or over `Z_{p-1}` after taking discrete logs
/// (multiplicative kinds).
pub fn rep_fn(b: &FSet, c: &FSet, kind: RepKind, method: Method) -> Result<RepFn> {
    check_same(b.p(), c.p())?;
    if kind.multiplicative() && (b.contains_zero() || c.contains_zero()) {
        return Err(Error::ZeroDivisor);
    }
    let field = b.field();
    let counts = match method.resolve(b.len(), c.len(), field.p()) {
        Method::Naive => rep_naive(b, c, kind),
        _ => rep_transform(b, c, kind),
    };
    Ok(RepFn::from_counts(field, kind, counts))
}

fn rep_naive(b: &FSet, c: &FSet, kind: RepKind) -> Vec<u64> {
    let f = b.field();
    let mut counts = vec![0u64; f.p() as usize];
    let cs: Vec<u64> = match kind {
        RepKind::Ratio => c.iter().map(|y| f.inverse(y).expect("zero-free")).collect(),
        _ => c.elements(),
    };
    for x in b.iter() {
        for &y in &cs {
            let z = match kind {
                RepKind::Sum => f.add(x, y),
                RepKind::Difference => f.sub(x, y),
                RepKind::Product | RepKind::Ratio => f.mul(x, y),
            };
            counts[z as usize] += 1;
        }
    }
    counts
}

fn narrow(v: Vec<u128>) -> Vec<u64> {
    v.into_iter()
        .map(|x| u64::try_from(x).expect("pair counts fit in u64"))
        .collect()
}

fn rep_transform(b: &FSet, c: &FSet, kind: RepKind) -> Vec<u64> {
    let f = b.field();
    let p = f.p() as usize;
    if !kind.multiplicative() {
        let vb = b.indicator();
        let vc = match kind {
            RepKind::Difference => c.negated().indicator(),
            _ => c.indicator(),
        };
        return narrow(cyclic(&vb, &vc, ConvMethod::Transform));
    }
    let n = p - 1;
    let dlog = f.dlog_table();
    let mut lb = vec![0u64; n];
    let mut lc = vec![0u64; n];
    for x in b.iter() {
        lb[dlog[x as usize] as usize] = 1;
    }
    for y in c.iter() {
        let e = dlog[y as usize] as usize;
        let e = if kind == RepKind::Ratio {
            (n - e) % n
        } else {
            e
        };
        lc[e] = 1;
    }
    let conv = cyclic(&lb, &lc, ConvMethod::Transform);
    let exp = f.exp_table();
    let mut counts = vec![0u64; p];
    for (i, v) in conv.into_iter().enumerate() {
        counts[exp[i] as usize] = v as u64;
    }
    counts
}

/// A moment exponent `num/den >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponent {
    pub num: u32,
    pub den: u32,
}

impl Exponent {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num < den {
            return Err(Error::BadExponent(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(n: u32) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadExponent(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => Exponent::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Exponent::integer(s.trim().parse().map_err(|_| bad())?),
        }
    }
}

/// Value of a moment: exact for integer exponents, floating otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Moment {
    Exact(u128),
    Real(f64),
}

impl Moment {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Moment::Exact(v) => v as f64,
            Moment::Real(v) => v,
        }
    }

    pub fn exact(&self) -> Option<u128> {
        match *self {
            Moment::Exact(v) => Some(v),
            Moment::Real(_) => None,
        }
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Exact(v) => write!(f, "{v}"),
            Moment::Real(v) => write!(f, "{v}"),
        }
    }
}

/// `Σ_x r(x)^n`. Fractional exponents are summed in `f64` in increasing
/// value order with compensated summation, so the result is reproducible.
pub fn moment(r: &RepFn, n: Exponent) -> Result<Moment> {
    if n.is_integer() {
        let mut acc: u128 = 0;
        for (_, c) in r.nonzero() {
            let term = (c as u128)
                .checked_pow(n.num)
                .ok_or_else(|| Error::SizeCap(format!("moment {n} overflows u128")))?;
            acc = acc
                .checked_add(term)
                .ok_or_else(|| Error::SizeCap(format!("moment {n} overflows u128")))?;
        }
        Ok(Moment::Exact(acc))
    } else {
        let e = n.as_f64();
        Ok(Moment::Real(neumaier_sum(
            r.nonzero().map(|(_, c)| (c as f64).powf(e)),
        )))
    }
}

/// Integer moment as `u128`; panics on a fractional exponent.
pub fn moment_int(r: &RepFn, n: u32) -> u128 {
    moment(r, Exponent::integer(n).expect("n >= 1"))
        .expect("moment fits")
        .exact()
        .expect("integer exponent")
}

pub(crate) fn neumaier_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// `X_k = {x : r(x) >= k}` with `n_k = |X_k|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    pub k: u64,
    pub members: FSet,
    pub n_k: usize,
}

pub fn level_set(r: &RepFn, k: u64) -> Result<LevelSet> {
    if k == 0 {
        return Err(Error::BadParams("level threshold k must be >= 1".into()));
    }
    let members = r.select(|c| c >= k);
    let n_k = members.len();
    Ok(LevelSet { k, members, n_k })
}

/// `n_k` for every `k` in `0..=max_count` (`n_0` counts the support too).
pub fn level_counts(r: &RepFn) -> Vec<u64> {
    let max = r.max_count() as usize;
    let mut hist = vec![0u64; max + 2];
    for (_, c) in r.nonzero() {
        hist[c as usize] += 1;
    }
    // suffix sums: n_k = #{x : r(x) >= k}
    let mut out = vec![0u64; max + 1];
    let mut acc = 0;
    for k in (1..=max).rev() {
        acc += hist[k];
        out[k] = acc;
    }
    if max > 0 || !out.is_empty() {
        out[0] = acc;
    }
    out
}

/// The dyadic threshold `k = 2^j` maximizing `k⁴ n_k` (smallest on ties),
/// i.e. the level a dyadic pigeonhole of `E_4` selects. `None` for an empty
/// histogram.
pub fn dyadic_k_star(r: &RepFn) -> Option<LevelSet> {
    let n = level_counts(r);
    let max = r.max_count();
    let mut best: Option<(u128, u64)> = None;
    let mut k = 1u64;
    while k <= max {
        let score = (k as u128).pow(4) * n[k as usize] as u128;
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, k));
        }
        k *= 2;
    }
    best.map(|(_, k)| level_set(r, k).expect("k >= 1"))
}

/// Popular differences `{x : r_{B-C}(x) >= |B||C| / (2|B-C|)}`, compared
/// as exact rationals.
pub fn popular_diff(b: &FSet, c: &FSet) -> Result<FSet> {
    if b.is_empty() || c.is_empty() {
        return Err(Error::EmptySet);
    }
    let r = rep_fn(b, c, RepKind::Difference, Method::Auto)?;
    Ok(popular_from(&r))
}

pub(crate) fn popular_from(r: &RepFn) -> FSet {
    let support = r.support().len() as u128;
    let mass = r.mass() as u128;
    r.select(|cnt| 2 * support * cnt as u128 >= mass)
}

/// Result of thresholding `C + C` at `ε|C|²/|C+C|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PopularSums {
    pub epsilon: f64,
    /// Popular sums `P`.
    pub popular: FSet,
    /// `C' = {c ∈ C : |{c'' ∈ C : c + c'' ∈ P}| >= (1-ε)|C|}`.
    pub core: FSet,
    /// `|{(c, c') ∈ C² : c + c' ∈ P}|`.
    pub pairs_in_popular: u64,
}

/// `1 / log₂|C|`, the default popularity parameter.
pub fn default_epsilon(c_len: usize) -> f64 {
    1.0 / (c_len as f64).log2()
}

pub fn popular_sum_core(c: &FSet, epsilon: Option<f64>) -> Result<PopularSums> {
    if c.is_empty() {
        return Err(Error::EmptySet);
    }
    let eps = epsilon.unwrap_or_else(|| default_epsilon(c.len()));
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::BadEpsilon(eps));
    }
    let r = rep_fn(c, c, RepKind::Sum, Method::Auto)?;
    let sumset = r.support().len() as f64;
    let c2 = (c.len() * c.len()) as f64;
    let popular = r.select(|cnt| cnt as f64 * sumset >= eps * c2);
    let pairs_in_popular = popular.iter().map(|x| r.count(x)).sum();
    // hits(c) = |{c'' ∈ C : c + c'' ∈ P}| = r_{P-C}(c)
    let hits = rep_fn(&popular, c, RepKind::Difference, Method::Auto)?;
    let need = (1.0 - eps) * c.len() as f64;
    let core = FSet::from_elements(
        c.field(),
        c.iter().filter(|&x| hits.count(x) as f64 >= need),
    )?;
    Ok(PopularSums {
        epsilon: eps,
        popular,
        core,
        pairs_in_popular,
    })
}

/// Values whose count lies in `[Δ, 2Δ)`, `Δ` a power of two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicBucket {
    pub delta: u64,
    pub members: FSet,
    /// `Σ_{x ∈ T} r(x)`.
    pub count_sum: u64,
    /// `Σ_{x ∈ T} r(x)²`.
    pub count_sq_sum: u128,
}

impl DyadicBucket {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `|T|Δ`.
    pub fn size_delta(&self) -> u128 {
        self.len() as u128 * self.delta as u128
    }

    /// `|T|Δ²`.
    pub fn size_delta_sq(&self) -> u128 {
        self.len() as u128 * (self.delta as u128).pow(2)
    }

    /// `|T|Δⁿ` in floating point.
    pub fn score(&self, n: Exponent) -> f64 {
        self.len() as f64 * (self.delta as f64).powf(n.as_f64())
    }
}

/// Nonempty dyadic buckets in increasing `Δ`; together they partition the
/// support.
pub fn dyadic_buckets(r: &RepFn) -> Vec<DyadicBucket> {
    let mut out = Vec::new();
    let max = r.max_count();
    let mut delta = 1u64;
    while delta <= max {
        let hi = delta.saturating_mul(2);
        let members = r.select(|c| c >= delta && c < hi);
        if !members.is_empty() {
            let count_sum = members.iter().map(|x| r.count(x)).sum();
            let count_sq_sum = members.iter().map(|x| (r.count(x) as u128).pow(2)).sum();
            out.push(DyadicBucket {
                delta,
                members,
                count_sum,
                count_sq_sum,
            });
        }
        delta = hi;
    }
    out
}

/// The dyadic bucket maximizing `|P'|Δ'ⁿ` (smallest `Δ'` on ties).
pub fn energy_popular(r: &RepFn, n: Exponent) -> Result<DyadicBucket> {
    let mut best: Option<(f64, DyadicBucket)> = None;
    for b in dyadic_buckets(r) {
        let s = b.score(n);
        if best.as_ref().is_none_or(|(bs, _)| s > *bs) {
            best = Some((s, b));
        }
    }
    best.map(|(_, b)| b).ok_or(Error::EmptySet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{sample_subset, stream_rng};

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn set(field: &PrimeField, xs: &[u64]) -> FSet {
        FSet::from_elements(field, xs.iter().copied()).unwrap()
    }

    fn hist(r: &RepFn) -> Vec<(u64, u64)> {
        r.nonzero().collect()
    }

    #[test]
    fn rep_fn_examples() {
        let f7 = f(7);
        let b = set(&f7, &[1, 2, 3]);
        for m in [Method::Naive, Method::Transform] {
            let r = rep_fn(&b, &b, RepKind::Difference, m).unwrap();
            assert_eq!(hist(&r), vec![(0, 3), (1, 2), (2, 1), (5, 1), (6, 2)]);
            let one = set(&f7, &[1]);
            assert_eq!(
                hist(&rep_fn(&one, &one, RepKind::Ratio, m).unwrap()),
                vec![(1, 1)]
            );
            let g = set(&f7, &[1, 2, 4]);
            let r = rep_fn(&g, &g, RepKind::Ratio, m).unwrap();
            assert_eq!(hist(&r), vec![(1, 3), (2, 3), (4, 3)]);
        }
        let z = set(&f7, &[0, 1]);
        assert!(matches!(
            rep_fn(&z, &z, RepKind::Ratio, Method::Naive),
            Err(Error::ZeroDivisor)
        ));
    }

    #[test]
    fn moment_examples() {
        let f7 = f(7);
        let b = set(&f7, &[1, 2, 3]);
        let r = rep_fn(&b, &b, RepKind::Difference, Method::Auto).unwrap();
        assert_eq!(
            moment(&r, Exponent::integer(4).unwrap()).unwrap(),
            Moment::Exact(115)
        );
        assert_eq!(
            moment(&r, Exponent::integer(2).unwrap()).unwrap(),
            Moment::Exact(19)
        );
        assert_eq!(
            moment(&r, Exponent::integer(1).unwrap()).unwrap(),
            Moment::Exact(r.mass() as u128)
        );
        assert!(matches!(Exponent::new(1, 2), Err(Error::BadExponent(_))));
        assert!("0".parse::<Exponent>().is_err());
        assert_eq!(
            "4/3".parse::<Exponent>().unwrap(),
            Exponent { num: 4, den: 3 }
        );
        let frac = moment(&r, "4/3".parse().unwrap()).unwrap().as_f64();
        let expect = 3f64.powf(4.0 / 3.0) + 2.0 * 2f64.powf(4.0 / 3.0) + 2.0;
        assert!((frac - expect).abs() < 1e-12);
    }

    #[test]
    fn level_set_examples() {
        let f7 = f(7);
        let b = set(&f7, &[1, 2, 3]);
        let r = rep_fn(&b, &b, RepKind::Difference, Method::Auto).unwrap();
        let l = level_set(&r, 2).unwrap();
        assert_eq!(l.members.elements(), vec![0, 1, 6]);
        assert_eq!(l.n_k, 3);
        assert_eq!(level_set(&r, 1).unwrap().members, r.support());
        assert_eq!(level_set(&r, 4).unwrap().n_k, 0);
        assert_eq!(level_counts(&r), vec![5, 5, 3, 1]);
        // k⁴n_k: 1·5, 16·3 = 48 → k* = 2
        assert_eq!(dyadic_k_star(&r).unwrap().k, 2);
    }

    #[test]
    fn popular_diff_examples() {
        let f7 = f(7);
        let b = set(&f7, &[1, 2, 3]);
        let p = popular_diff(&b, &b).unwrap();
        assert_eq!(p.elements(), vec![0, 1, 2, 5, 6]);
        let r = rep_fn(&b, &b, RepKind::Difference, Method::Auto).unwrap();
        assert_eq!(p.iter().map(|x| r.count(x)).sum::<u64>(), 9);
        let s = set(&f7, &[4]);
        assert_eq!(popular_diff(&s, &s).unwrap().elements(), vec![0]);
        assert!(matches!(
            popular_diff(&FSet::empty(&f7), &s),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn popular_sum_examples() {
        let f7 = f(7);
        let z = set(&f7, &[0]);
        let ps = popular_sum_core(&z, Some(0.3)).unwrap();
        assert_eq!(ps.popular.elements(), vec![0]);
        assert_eq!(ps.core.elements(), vec![0]);
        let f101 = f(101);
        let c = FSet::from_elements(&f101, 1..=10).unwrap();
        let ps = popular_sum_core(&c, Some(0.25)).unwrap();
        assert!(ps.core.len() >= 8);
        // Threshold 25/19: sums with at least 2 representations, i.e. 3..=19.
        assert_eq!(ps.popular.elements(), (3..=19).collect::<Vec<_>>());
        assert!(ps.pairs_in_popular as f64 >= 0.75 * 100.0);
        assert!(matches!(
            popular_sum_core(&c, Some(1.0)),
            Err(Error::BadEpsilon(_))
        ));
        // |C| = 2 gives the default ε = 1, which is rejected.
        assert!(popular_sum_core(&set(&f7, &[1, 2]), None).is_err());
    }

    #[test]
    fn dyadic_examples() {
        let f7 = f(7);
        let b = set(&f7, &[1, 2, 3]);
        let r = rep_fn(&b, &b, RepKind::Difference, Method::Auto).unwrap();
        let buckets = dyadic_buckets(&r);
        assert_eq!(buckets.len(), 2);
        assert_eq!(
            (buckets[0].delta, buckets[0].members.elements()),
            (1, vec![2, 5])
        );
        assert_eq!(
            (buckets[1].delta, buckets[1].members.elements()),
            (2, vec![0, 1, 6])
        );
        let e = Exponent::new(4, 3).unwrap();
        let best = energy_popular(&r, e).unwrap();
        assert_eq!(best.delta, 2);
        assert!((best.score(e) - 3.0 * 2f64.powf(4.0 / 3.0)).abs() < 1e-12);
        let empty = rep_fn(&FSet::empty(&f7), &b, RepKind::Sum, Method::Naive).unwrap();
        assert!(dyadic_buckets(&empty).is_empty());
        assert!(matches!(energy_popular(&empty, e), Err(Error::EmptySet)));
    }

    #[test]
    fn constant_histogram_is_one_bucket() {
        let f7 = f(7);
        let g = set(&f7, &[1, 2, 4]);
        let r = rep_fn(&g, &g, RepKind::Ratio, Method::Auto).unwrap();
        let b = energy_popular(&r, Exponent::new(4, 3).unwrap()).unwrap();
        assert_eq!(b.delta, 2);
        assert_eq!(b.members, r.support());
    }

    #[test]
    fn random_instance_identities() {
        for i in 0..100u64 {
            let p = [101u64, 257, 1009][i as usize % 3];
            let field = f(p);
            let mut rng = stream_rng(5, i);
            let b = FSet::from_elements(
                &field,
                sample_subset(&mut rng, 1, p, 1 + (i as usize * 7) % 60),
            )
            .unwrap();
            let c = FSet::from_elements(
                &field,
                sample_subset(&mut rng, 1, p, 1 + (i as usize * 13) % 60),
            )
            .unwrap();
            let r = rep_fn(&b, &c, RepKind::Difference, Method::Auto).unwrap();
            assert_eq!(r.mass(), (b.len() * c.len()) as u64);
            let rc = rep_fn(&c, &b, RepKind::Difference, Method::Auto).unwrap();
            for x in 0..p {
                assert_eq!(r.count(x), rc.count(field.neg(x)));
            }
            // Cauchy-Schwarz: E₂ · |B-C| >= (|B||C|)²
            let e2 = moment_int(&r, 2);
            assert!(e2 * r.support().len() as u128 >= (r.mass() as u128).pow(2));
            // layer-cake: E₄ = Σ_k n_k (k⁴ - (k-1)⁴)
            let n = level_counts(&r);
            let layer: u128 = (1..n.len())
                .map(|k| n[k] as u128 * ((k as u128).pow(4) - (k as u128 - 1).pow(4)))
                .sum();
            assert_eq!(layer, moment_int(&r, 4));
            // buckets partition the support with termwise mass bounds
            let buckets = dyadic_buckets(&r);
            assert_eq!(
                buckets.iter().map(|b| b.len()).sum::<usize>(),
                r.support().len()
            );
            let lo: u128 = buckets.iter().map(|b| b.size_delta()).sum();
            assert!(lo <= r.mass() as u128 && r.mass() as u128 <= 2 * lo);
            let pop = popular_from(&r);
            let pm: u64 = pop.iter().map(|x| r.count(x)).sum();
            assert!(2 * pm >= r.mass());
        }
    }

    #[test]
    fn affine_maps_preserve_the_count_multiset() {
        let field = f(257);
        let mut rng = stream_rng(11, 0);
        let b = FSet::from_elements(&field, sample_subset(&mut rng, 0, 257, 30)).unwrap();
        let c = FSet::from_elements(&field, sample_subset(&mut rng, 0, 257, 25)).unwrap();
        let sorted = |r: &RepFn| {
            let mut v: Vec<u64> = r.nonzero().map(|(_, c)| c).collect();
            v.sort();
            v
        };
        let r = rep_fn(&b, &c, RepKind::Difference, Method::Auto).unwrap();
        for (l, t) in [(3, 5), (200, 0), (1, 100)] {
            let b2 = crate::sets::affine(&b, l, t).unwrap();
            let c2 = crate::sets::affine(&c, l, t).unwrap();
            let r2 = rep_fn(&b2, &c2, RepKind::Difference, Method::Auto).unwrap();
            assert_eq!(sorted(&r), sorted(&r2));
        }
    }
}
