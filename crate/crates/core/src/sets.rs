//! Subsets of F_p as bit masks, with sumsets, difference sets, product sets,
//! ratio sets and the structured instance families used by the sweeps.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::energy::{rep_fn, RepKind};
use crate::error::{check_same, Error, Result};
use crate::field::PrimeField;
use crate::rng::{sample_subset, stream_rng};
use crate::Method;

/// A subset of F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSet {
    field: PrimeField,
    mask: BitSet,
    size: usize,
}

impl FSet {
    pub fn empty(field: &PrimeField) -> Self {
        Self {
            field: field.clone(),
            mask: BitSet::new(field.p() as usize),
            size: 0,
        }
    }

    /// All of F_p.
    pub fn full(field: &PrimeField) -> Self {
        Self::from_predicate(field, |_| true)
    }

    /// F_p^*.
    pub fn nonzero(field: &PrimeField) -> Self {
        Self::from_predicate(field, |x| x != 0)
    }

    pub fn from_predicate(field: &PrimeField, mut keep: impl FnMut(u64) -> bool) -> Self {
        let mut mask = BitSet::new(field.p() as usize);
        for x in 0..field.p() {
            if keep(x) {
                mask.insert(x as usize);
            }
        }
        Self::from_mask(field, mask)
    }

    pub(crate) fn from_mask(field: &PrimeField, mask: BitSet) -> Self {
        debug_assert_eq!(mask.len(), field.p() as usize);
        let size = mask.count_ones();
        Self {
            field: field.clone(),
            mask,
            size,
        }
    }

    /// Collects residues into a set; repeated elements collapse.
    pub fn from_elements(field: &PrimeField, elems: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut mask = BitSet::new(field.p() as usize);
        for x in elems {
            if x >= field.p() {
                return Err(Error::BadParams(format!(
                    "element {x} is not a residue mod {}",
                    field.p()
                )));
            }
            mask.insert(x as usize);
        }
        Ok(Self::from_mask(field, mask))
    }

    /// Like [`from_elements`](Self::from_elements) but rejects duplicates.
    pub fn explicit(field: &PrimeField, elems: &[u64]) -> Result<Self> {
        let set = Self::from_elements(field, elems.iter().copied())?;
        if set.len() != elems.len() {
            return Err(Error::BadParams(
                "duplicate element in explicit list".into(),
            ));
        }
        Ok(set)
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.field.p()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        self.mask.contains(x as usize)
    }

    #[inline]
    pub fn contains_zero(&self) -> bool {
        self.contains(0)
    }

    pub fn mask(&self) -> &BitSet {
        &self.mask
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.mask.iter_ones().map(|i| i as u64)
    }

    pub fn elements(&self) -> Vec<u64> {
        self.iter().collect()
    }

    /// Indicator vector of length `p`.
    pub fn indicator(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.p() as usize];
        for x in self.iter() {
            v[x as usize] = 1;
        }
        v
    }

    pub fn is_subset(&self, other: &FSet) -> bool {
        self.p() == other.p() && self.iter().all(|x| other.contains(x))
    }

    /// The image of the set under `f`, collapsing collisions.
    pub fn map(&self, mut f: impl FnMut(u64) -> u64) -> FSet {
        let mut mask = BitSet::new(self.p() as usize);
        for x in self.iter() {
            mask.insert(f(x) as usize);
        }
        FSet::from_mask(&self.field, mask)
    }

    /// `-A`.
    pub fn negated(&self) -> FSet {
        let f = self.field.clone();
        self.map(|x| f.neg(x))
    }

    pub fn without_zero(&self) -> FSet {
        let mut mask = self.mask.clone();
        if mask.contains(0) {
            let mut fresh = BitSet::new(mask.len());
            for i in mask.iter_ones().filter(|&i| i != 0) {
                fresh.insert(i);
            }
            mask = fresh;
        }
        FSet::from_mask(&self.field, mask)
    }

    pub fn union(&self, other: &FSet) -> Result<FSet> {
        check_same(self.p(), other.p())?;
        let mut mask = self.mask.clone();
        mask.union_with(&other.mask);
        Ok(FSet::from_mask(&self.field, mask))
    }
}

/// Binary set operations `A ∘ B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetOp {
    Sum,
    Diff,
    Prod,
    Ratio,
}

impl std::str::FromStr for SetOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" | "+" => Ok(SetOp::Sum),
            "diff" | "-" => Ok(SetOp::Diff),
            "prod" | "*" => Ok(SetOp::Prod),
            "ratio" | "/" => Ok(SetOp::Ratio),
            _ => Err(Error::BadParams(format!("unknown set operation {s:?}"))),
        }
    }
}

/// `A ∘ B` by the cheaper of pairwise enumeration and convolution support.
pub fn combine(a: &FSet, b: &FSet, op: SetOp) -> Result<FSet> {
    combine_with(a, b, op, Method::Auto)
}

pub fn combine_with(a: &FSet, b: &FSet, op: SetOp, method: Method) -> Result<FSet> {
    check_same(a.p(), b.p())?;
    if op == SetOp::Ratio && b.contains_zero() {
        return Err(Error::ZeroDivisor);
    }
    let field = a.field();
    match method.resolve(a.len(), b.len(), field.p()) {
        Method::Naive => Ok(combine_enumerate(a, b, op)),
        _ => combine_transform(a, b, op),
    }
}

fn combine_enumerate(a: &FSet, b: &FSet, op: SetOp) -> FSet {
    let f = a.field();
    let bs: Vec<u64> = match op {
        SetOp::Ratio => b.iter().map(|y| f.inverse(y).expect("checked")).collect(),
        _ => b.elements(),
    };
    let mut mask = BitSet::new(f.p() as usize);
    for x in a.iter() {
        for &y in &bs {
            let z = match op {
                SetOp::Sum => f.add(x, y),
                SetOp::Diff => f.sub(x, y),
                SetOp::Prod | SetOp::Ratio => f.mul(x, y),
            };
            mask.insert(z as usize);
        }
    }
    FSet::from_mask(f, mask)
}

fn combine_transform(a: &FSet, b: &FSet, op: SetOp) -> Result<FSet> {
    let f = a.field();
    let kind = match op {
        SetOp::Sum => RepKind::Sum,
        SetOp::Diff => RepKind::Difference,
        SetOp::Prod => RepKind::Product,
        SetOp::Ratio => RepKind::Ratio,
    };
    // Products and ratios run over F_p^*; a zero operand contributes 0.
    let (a_nz, b_nz, zero) = match op {
        SetOp::Prod => (
            a.without_zero(),
            b.without_zero(),
            (a.contains_zero() && !b.is_empty()) || (b.contains_zero() && !a.is_empty()),
        ),
        SetOp::Ratio => (
            a.without_zero(),
            b.clone(),
            a.contains_zero() && !b.is_empty(),
        ),
        _ => (a.clone(), b.clone(), false),
    };
    let r = rep_fn(&a_nz, &b_nz, kind, Method::Transform)?;
    let mut mask = r.support_mask();
    if zero {
        mask.insert(0);
    }
    Ok(FSet::from_mask(f, mask))
}

/// `{λa + t : a ∈ A}`.
pub fn affine(a: &FSet, lambda: u64, t: u64) -> Result<FSet> {
    let f = a.field().clone();
    let (lambda, t) = (lambda % f.p(), t % f.p());
    if lambda == 0 {
        return Err(Error::ZeroDilation);
    }
    Ok(a.map(|x| f.add(f.mul(lambda, x), t)))
}

/// Instance families for sweeps and the `gen` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `{start, start+1, ..., start+len-1}`.
    Interval {
        start: u64,
        len: usize,
    },
    /// `{start + i·step}`.
    Ap {
        start: u64,
        step: u64,
        len: usize,
    },
    /// `{start · ratio^i}`.
    Gp {
        start: u64,
        ratio: u64,
        len: usize,
    },
    /// The unique subgroup of F_p^* of the given order.
    MulSubgroup {
        order: u64,
    },
    /// Uniform random subset; `zero_free` draws from F_p^* only.
    Random {
        len: usize,
        #[serde(default)]
        zero_free: bool,
    },
    Explicit {
        elements: Vec<u64>,
    },
}

impl Family {
    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            Family::Interval { .. } => "interval",
            Family::Ap { .. } => "ap",
            Family::Gp { .. } => "gp",
            Family::MulSubgroup { .. } => "mul_subgroup",
            Family::Random { .. } => "random",
            Family::Explicit { .. } => "explicit",
        }
    }
}

/// Builds a member of `family`. Random families draw from stream `(seed, id)`.
pub fn generate(field: &PrimeField, family: &Family, seed: u64, id: u64) -> Result<FSet> {
    let p = field.p();
    let too_big = |n: usize| Error::BadParams(format!("requested size {n} exceeds p = {p}"));
    match family {
        &Family::Interval { start, len } => {
            if len as u64 > p {
                return Err(too_big(len));
            }
            FSet::from_elements(field, (0..len as u64).map(|i| (start + i) % p))
        }
        &Family::Ap { start, step, len } => {
            if len as u64 > p {
                return Err(too_big(len));
            }
            if step % p == 0 && len > 1 {
                return Err(Error::BadParams("progression step is 0 mod p".into()));
            }
            FSet::from_elements(
                field,
                (0..len as u64).map(|i| (start + i % p * (step % p)) % p),
            )
        }
        &Family::Gp { start, ratio, len } => {
            let (start, ratio) = (start % p, ratio % p);
            if start == 0 || ratio == 0 {
                return Err(Error::BadParams(
                    "geometric progression needs nonzero start and ratio".into(),
                ));
            }
            let mut elems = Vec::with_capacity(len);
            let mut cur = start;
            for _ in 0..len {
                elems.push(cur);
                cur = field.mul(cur, ratio);
            }
            FSet::explicit(field, &elems)
                .map_err(|_| Error::BadParams(format!("ratio {ratio} has order below {len}")))
        }
        &Family::MulSubgroup { order } => {
            if order == 0 || (p - 1) % order != 0 {
                return Err(Error::BadParams(format!(
                    "order {order} does not divide p-1 = {}",
                    p - 1
                )));
            }
            let step = (p - 1) / order;
            FSet::from_elements(field, (0..order).map(|i| field.exp(i * step)))
        }
        &Family::Random { len, zero_free } => {
            let lo = u64::from(zero_free);
            if len as u64 > p - lo {
                return Err(too_big(len));
            }
            let mut rng = stream_rng(seed, id);
            FSet::from_elements(field, sample_subset(&mut rng, lo, p, len))
        }
        Family::Explicit { elements } => FSet::explicit(field, elements),
    }
}
