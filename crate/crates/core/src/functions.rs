//! Function tables `F_p^* → F_p^*`, the multiplicity `μ`, and images
//! `f(A,B) = {g(a)(h(a) + b)}`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{check_same, Error, Result};
use crate::field::PrimeField;
use crate::rng::stream_rng;
use crate::sets::FSet;

/// A total function on F_p^* with values in F_p^*.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnTable {
    field: PrimeField,
    // values[0] is unused and kept at 0.
    values: Vec<u64>,
}

impl FnTable {
    /// Builds a table from `values[x-1] = g(x)` for `x = 1..p-1`.
    pub fn from_values(field: &PrimeField, values: &[u64]) -> Result<Self> {
        let p = field.p();
        if values.len() as u64 != p - 1 {
            return Err(Error::BadParams(format!(
                "function table needs {} values, got {}",
                p - 1,
                values.len()
            )));
        }
        let mut table = Vec::with_capacity(p as usize);
        table.push(0);
        for (i, &v) in values.iter().enumerate() {
            let v = v % p;
            if v == 0 {
                return Err(Error::ZeroInCodomain(i as u64 + 1));
            }
            table.push(v);
        }
        Ok(Self {
            field: field.clone(),
            values: table,
        })
    }

    fn from_fn(field: &PrimeField, mut f: impl FnMut(u64) -> u64) -> Result<Self> {
        let vals: Vec<u64> = (1..field.p()).map(&mut f).collect();
        Self::from_values(field, &vals)
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// `g(x)`; panics on `x = 0`.
    #[inline]
    pub fn get(&self, x: u64) -> u64 {
        assert!(x != 0, "functions are defined on F_p^* only");
        self.values[x as usize]
    }

    /// `(x, g(x))` for `x = 1..p-1`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(x, &v)| (x as u64, v))
    }

    pub fn values(&self) -> &[u64] {
        &self.values[1..]
    }
}

/// How to build a [`FnTable`]; parses from the CLI spec strings
/// `const:<c>`, `id`, `power:<k>`, `affine:<u>,<v>`, `random[:<seed>]`,
/// `file:<path>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FnSpec {
    Const(u64),
    Identity,
    Power(i64),
    Affine(u64, u64),
    /// Uniform random values. Without a seed the caller supplies one.
    Random(Option<u64>),
    File(PathBuf),
    Table(Vec<u64>),
}

impl FnSpec {
    /// Builds the table. A seedless `Random` draws from stream
    /// `(default_seed, stream)`; a seeded one from `(seed, stream)`.
    pub fn build(&self, field: &PrimeField, default_seed: u64, stream: u64) -> Result<FnTable> {
        let p = field.p();
        match self {
            &FnSpec::Const(c) => {
                if c % p == 0 {
                    return Err(Error::ZeroInCodomain(1));
                }
                FnTable::from_fn(field, |_| c % p)
            }
            FnSpec::Identity => FnTable::from_fn(field, |x| x),
            &FnSpec::Power(k) => FnTable::from_fn(field, |x| field.pow(x, k).expect("x != 0")),
            &FnSpec::Affine(u, v) => {
                let (u, v) = (u % p, v % p);
                for x in 1..p {
                    if field.add(field.mul(u, x), v) == 0 {
                        return Err(Error::ZeroInCodomain(x));
                    }
                }
                FnTable::from_fn(field, |x| field.add(field.mul(u, x), v))
            }
            &FnSpec::Random(seed) => {
                let mut rng = stream_rng(seed.unwrap_or(default_seed), stream);
                FnTable::from_fn(field, |_| rng.gen_range(1..p))
            }
            FnSpec::File(path) => {
                let t = crate::io::read_fn_table(path)?;
                check_same(t.field().p(), p)?;
                Ok(t)
            }
            FnSpec::Table(vals) => FnTable::from_values(field, vals),
        }
    }
}

/// Builds a table from a spec that does not need an external seed.
pub fn make_fn(field: &PrimeField, spec: &FnSpec) -> Result<FnTable> {
    spec.build(field, 0, 0)
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::Const(c) => write!(f, "const:{c}"),
            FnSpec::Identity => write!(f, "id"),
            FnSpec::Power(k) => write!(f, "power:{k}"),
            FnSpec::Affine(u, v) => write!(f, "affine:{u},{v}"),
            FnSpec::Random(None) => write!(f, "random"),
            FnSpec::Random(Some(s)) => write!(f, "random:{s}"),
            FnSpec::File(p) => write!(f, "file:{}", p.display()),
            FnSpec::Table(v) => {
                write!(f, "table:")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FnSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadParams(format!("bad function spec {s:?}"));
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: &str| a.trim().parse::<u64>().map_err(|_| bad());
        match (head, arg) {
            ("id" | "identity", None) => Ok(FnSpec::Identity),
            ("const", Some(a)) => Ok(FnSpec::Const(num(a)?)),
            ("power", Some(a)) => Ok(FnSpec::Power(a.trim().parse().map_err(|_| bad())?)),
            ("affine", Some(a)) => {
                let (u, v) = a.split_once(',').ok_or_else(bad)?;
                Ok(FnSpec::Affine(num(u)?, num(v)?))
            }
            ("random", None) => Ok(FnSpec::Random(None)),
            ("random", Some(a)) => Ok(FnSpec::Random(Some(num(a)?))),
            ("file", Some(a)) if !a.is_empty() => Ok(FnSpec::File(PathBuf::from(a))),
            ("table", Some(a)) => a
                .split(',')
                .map(num)
                .collect::<Result<_>>()
                .map(FnSpec::Table),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for FnSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FnSpec> for String {
    fn from(s: FnSpec) -> String {
        s.to_string()
    }
}

/// `μ(g)`: the largest fiber `|{x ∈ G : g(x) = t}|` over `t ∈ F_p^*`, with
/// `G` the given domain minus 0 (all of F_p^* by default). Returns 0 for an
/// empty domain.
pub fn mu(g: &FnTable, domain: Option<&FSet>) -> Result<u64> {
    let p = g.field().p() as usize;
    let mut fibers = vec![0u64; p];
    match domain {
        Some(d) => {
            check_same(d.p(), g.field().p())?;
            for x in d.iter().filter(|&x| x != 0) {
                fibers[g.get(x) as usize] += 1;
            }
        }
        None => {
            for (_, v) in g.iter() {
                fibers[v as usize] += 1;
            }
        }
    }
    Ok(fibers.into_iter().max().unwrap_or(0))
}

/// `(g·h)(x) = g(x)h(x)`.
pub fn pointwise_product(g: &FnTable, h: &FnTable) -> Result<FnTable> {
    check_same(g.field().p(), h.field().p())?;
    let f = g.field();
    FnTable::from_fn(f, |x| f.mul(g.get(x), h.get(x)))
}

/// `f(A,B) = {g(a)(h(a) + b) : a ∈ A, b ∈ B}`; 0 is kept when it occurs.
pub fn f_image(g: &FnTable, h: &FnTable, a: &FSet, b: &FSet) -> Result<FSet> {
    let p = g.field().p();
    check_same(p, h.field().p())?;
    check_same(p, a.p())?;
    check_same(p, b.p())?;
    if a.contains_zero() {
        return Err(Error::ZeroInA);
    }
    let f = g.field();
    let mut mask = BitSet::new(p as usize);
    // For fixed a the map b ↦ g(a)(h(a)+b) is an affine bijection, so the
    // image is a union of affine copies of B; copies repeat when (g(a), h(a))
    // repeats.
    let mut seen = std::collections::HashSet::new();
    for x in a.iter() {
        let (ga, ha) = (g.get(x), h.get(x));
        if !seen.insert((ga, ha)) {
            continue;
        }
        for y in b.iter() {
            mask.insert(f.mul(ga, f.add(ha, y)) as usize);
        }
    }
    Ok(FSet::from_mask(f, mask))
}
