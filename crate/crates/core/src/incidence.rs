//! Points and planes in F_p³: exact incidence counts, the largest collinear
//! subset of a point set, and the point/plane families built from
//! representation-function equations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_same, Error, Result};
use crate::field::PrimeField;
use crate::functions::FnTable;
use crate::sets::FSet;

/// Largest number of distinct `(y, z)` columns [`max_collinear`] accepts.
pub const MAX_COLLINEAR_COLUMNS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point3 {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl Point3 {
    pub fn new(x: u64, y: u64, z: u64) -> Self {
        Self { x, y, z }
    }
}

/// The plane `aX + bY + cZ + d = 0`, scaled so the first nonzero of
/// `(a, b, c)` is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Plane3 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Plane3 {
    /// Normalizes the coefficients; `BadParams` if `a = b = c = 0`.
    pub fn new(field: &PrimeField, a: u64, b: u64, c: u64, d: u64) -> Result<Self> {
        let p = field.p();
        let (a, b, c, d) = (a % p, b % p, c % p, d % p);
        let lead = [a, b, c]
            .into_iter()
            .find(|&v| v != 0)
            .ok_or_else(|| Error::BadParams("plane normal (a, b, c) must be nonzero".into()))?;
        let s = field.inverse(lead)?;
        Ok(Self {
            a: field.mul(a, s),
            b: field.mul(b, s),
            c: field.mul(c, s),
            d: field.mul(d, s),
        })
    }

    pub fn contains(&self, field: &PrimeField, pt: &Point3) -> bool {
        let f = field;
        let v = f.add(
            f.add(f.mul(self.a, pt.x), f.mul(self.b, pt.y)),
            f.add(f.mul(self.c, pt.z), self.d),
        );
        v == 0
    }
}

impl fmt::Display for Plane3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}X + {}Y + {}Z + {} = 0",
            self.a, self.b, self.c, self.d
        )
    }
}

/// A set of points and a set of planes over one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceConfig {
    field: PrimeField,
    points: Vec<Point3>,
    planes: Vec<Plane3>,
    provenance: Option<String>,
}

impl IncidenceConfig {
    /// Sorts and deduplicates both families. Planes are expected in
    /// normalized form (as produced by [`Plane3::new`]).
    pub fn new(
        field: &PrimeField,
        mut points: Vec<Point3>,
        mut planes: Vec<Plane3>,
        provenance: Option<String>,
    ) -> Result<Self> {
        let p = field.p();
        if let Some(pt) = points.iter().find(|q| q.x >= p || q.y >= p || q.z >= p) {
            return Err(Error::BadParams(format!(
                "point {pt:?} has a coordinate >= p"
            )));
        }
        for pl in &planes {
            if *pl != Plane3::new(field, pl.a, pl.b, pl.c, pl.d)? || pl.d >= p {
                return Err(Error::BadParams(format!("plane {pl:?} is not normalized")));
            }
        }
        points.sort_unstable();
        points.dedup();
        planes.sort_unstable();
        planes.dedup();
        Ok(Self {
            field: field.clone(),
            points,
            planes,
            provenance,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn planes(&self) -> &[Plane3] {
        &self.planes
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }
}

/// `O(|R||S|)` reference count.
pub fn incidences_naive(cfg: &IncidenceConfig) -> u64 {
    let f = cfg.field();
    cfg.planes
        .par_iter()
        .map(|pl| cfg.points.iter().filter(|pt| pl.contains(f, pt)).count() as u64)
        .sum()
}

/// Exact `I(R, S)`.
///
/// Planes are split by which normal coefficient is the leading 1. For
/// `X + bY + cZ + d = 0` three strategies are costed and the cheapest runs:
/// one pass over the points per `(b, c)` class, or a per-`y` (per-`z`)
/// histogram of the planes sharing a `c` (`b`) coefficient.
pub fn incidences(cfg: &IncidenceConfig) -> u64 {
    let f = cfg.field();
    let p = f.p() as usize;
    let pts = &cfg.points;
    if pts.is_empty() || cfg.planes.is_empty() {
        return 0;
    }
    let mut lead_x = Vec::new();
    let mut lead_y: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut lead_z = Vec::new();
    for pl in &cfg.planes {
        if pl.a == 1 {
            lead_x.push((pl.b, pl.c, pl.d));
        } else if pl.b == 1 {
            lead_y.entry(pl.c).or_default().push(pl.d);
        } else {
            lead_z.push(pl.d);
        }
    }
    let mut total = 0u64;

    if !lead_x.is_empty() {
        let xyz: Vec<(u64, u64, u64)> = pts.iter().map(|q| (q.x, q.y, q.z)).collect();
        let distinct = |it: &mut dyn Iterator<Item = u64>| {
            let mut v: Vec<u64> = it.collect();
            v.sort_unstable();
            v.dedup();
            v.len() as u128
        };
        let n_pts = pts.len() as u128;
        let n_pl = lead_x.len() as u128;
        let ys = distinct(&mut pts.iter().map(|q| q.y));
        let zs = distinct(&mut pts.iter().map(|q| q.z));
        let bs = distinct(&mut lead_x.iter().map(|t| t.0));
        let cs = distinct(&mut lead_x.iter().map(|t| t.1));
        let bcs = distinct(&mut lead_x.iter().map(|t| t.0 * p as u64 + t.1));
        let cost_class = bcs * n_pts + n_pl;
        let cost_by_y = ys * n_pl + cs * n_pts;
        let cost_by_z = zs * n_pl + bs * n_pts;
        total += if cost_class <= cost_by_y && cost_class <= cost_by_z {
            count_by_class(f, &xyz, &lead_x)
        } else if cost_by_y <= cost_by_z {
            count_by_histogram(f, &xyz, &lead_x)
        } else {
            // x + bY + cZ + d is symmetric under (y, b) <-> (z, c).
            let swapped: Vec<_> = xyz.iter().map(|&(x, y, z)| (x, z, y)).collect();
            let planes: Vec<_> = lead_x.iter().map(|&(b, c, d)| (c, b, d)).collect();
            count_by_histogram(f, &swapped, &planes)
        };
    }

    if !lead_y.is_empty() {
        // Y + cZ + d = 0 ignores x: weight each (y, z) column by its size.
        let mut columns: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for q in pts {
            *columns.entry((q.y, q.z)).or_default() += 1;
        }
        let columns: Vec<_> = columns.into_iter().collect();
        let classes: Vec<_> = lead_y.into_iter().collect();
        total += classes
            .par_iter()
            .map_init(
                || vec![false; p],
                |mark, (c, ds)| {
                    for &d in ds {
                        mark[d as usize] = true;
                    }
                    let mut acc = 0;
                    for &((y, z), w) in &columns {
                        if mark[f.neg(f.add(y, f.mul(*c, z))) as usize] {
                            acc += w;
                        }
                    }
                    for &d in ds {
                        mark[d as usize] = false;
                    }
                    acc
                },
            )
            .sum::<u64>();
    }

    if !lead_z.is_empty() {
        let mut by_z = vec![0u64; p];
        for q in pts {
            by_z[q.z as usize] += 1;
        }
        total += lead_z.iter().map(|&d| by_z[f.neg(d) as usize]).sum::<u64>();
    }
    total
}

fn count_by_class(f: &PrimeField, pts: &[(u64, u64, u64)], planes: &[(u64, u64, u64)]) -> u64 {
    let mut classes: BTreeMap<(u64, u64), Vec<u64>> = BTreeMap::new();
    for &(b, c, d) in planes {
        classes.entry((b, c)).or_default().push(d);
    }
    let classes: Vec<_> = classes.into_iter().collect();
    let p = f.p() as usize;
    classes
        .par_iter()
        .map_init(
            || vec![false; p],
            |mark, ((b, c), ds)| {
                for &d in ds {
                    mark[d as usize] = true;
                }
                let mut acc = 0;
                for &(x, y, z) in pts {
                    let s = f.add(x, f.add(f.mul(*b, y), f.mul(*c, z)));
                    if mark[f.neg(s) as usize] {
                        acc += 1;
                    }
                }
                for &d in ds {
                    mark[d as usize] = false;
                }
                acc
            },
        )
        .sum()
}

/// Planes grouped by `c`, points by `y`: for each pair of groups, histogram
/// `bY + d` over the planes and look up `-(x + cZ)` for each point.
fn count_by_histogram(f: &PrimeField, pts: &[(u64, u64, u64)], planes: &[(u64, u64, u64)]) -> u64 {
    let mut by_c: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
    for &(b, c, d) in planes {
        by_c.entry(c).or_default().push((b, d));
    }
    let mut by_y: BTreeMap<u64, Vec<(u64, u64)>> = BTreeMap::new();
    for &(x, y, z) in pts {
        by_y.entry(y).or_default().push((x, z));
    }
    let by_c: Vec<_> = by_c.into_iter().collect();
    let by_y: Vec<_> = by_y.into_iter().collect();
    let p = f.p() as usize;
    by_c.par_iter()
        .map_init(
            || (vec![0u32; p], Vec::new()),
            |(hist, touched), (c, bd)| {
                let mut acc = 0u64;
                for (y, xz) in &by_y {
                    for &(b, d) in bd {
                        let v = f.add(f.mul(b, *y), d) as usize;
                        if hist[v] == 0 {
                            touched.push(v);
                        }
                        hist[v] += 1;
                    }
                    for &(x, z) in xz {
                        acc += hist[f.neg(f.add(x, f.mul(*c, z))) as usize] as u64;
                    }
                    for v in touched.drain(..) {
                        hist[v] = 0;
                    }
                }
                acc
            },
        )
        .sum()
}

/// Largest number of points of `points` on one line of F_p³ (0 for none).
///
/// Lines parallel to the x-axis are the `(y, z)` columns. Any other line
/// meets each column at most once and projects onto a line of the
/// `(y, z)`-plane; it is found from its first column in sorted order by
/// grouping the later columns by direction and counting slopes.
pub fn max_collinear(field: &PrimeField, points: &[Point3]) -> Result<u64> {
    let mut cols: BTreeMap<(u64, u64), Vec<u64>> = BTreeMap::new();
    for q in points {
        cols.entry((q.y, q.z)).or_default().push(q.x);
    }
    for xs in cols.values_mut() {
        xs.sort_unstable();
        xs.dedup();
    }
    let cols: Vec<((u64, u64), Vec<u64>)> = cols.into_iter().collect();
    let k = cols.len();
    if k > MAX_COLLINEAR_COLUMNS {
        return Err(Error::SizeCap(format!(
            "{k} columns exceeds the collinearity cap {MAX_COLLINEAR_COLUMNS}"
        )));
    }
    let best = AtomicU64::new(
        cols.iter()
            .map(|(_, xs)| xs.len() as u64)
            .max()
            .unwrap_or(0),
    );
    if k <= 1 {
        return Ok(best.into_inner());
    }
    let f = field;
    let p = f.p() as usize;
    let inv: Vec<u64> = {
        let mut t = vec![0u64; p];
        for (x, slot) in t.iter_mut().enumerate().skip(1) {
            *slot = f.inverse(x as u64).expect("x != 0");
        }
        t
    };
    (0..k).into_par_iter().for_each_init(
        || {
            (
                vec![0u32; p],
                Vec::<usize>::new(),
                Vec::<(u64, usize, u64)>::new(),
            )
        },
        |(count, touched, dirs), i| {
            if (k - i) as u64 <= best.load(Ordering::Relaxed) {
                return;
            }
            let ((y0, z0), ref anchor) = cols[i];
            dirs.clear();
            for (j, ((y, z), _)) in cols.iter().enumerate().skip(i + 1) {
                let (dy, dz) = (f.sub(*y, y0), f.sub(*z, z0));
                // direction (1, dz/dy) with parameter dy, or (0, 1) with dz
                if dy != 0 {
                    dirs.push((f.mul(dz, inv[dy as usize]), j, dy));
                } else {
                    dirs.push((p as u64, j, dz));
                }
            }
            dirs.sort_unstable();
            for group in dirs.chunk_by(|u, v| u.0 == v.0) {
                if (group.len() as u64) < best.load(Ordering::Relaxed) {
                    continue;
                }
                for &x0 in anchor {
                    let mut top = 0u32;
                    for &(_, j, t) in group {
                        let it = inv[t as usize];
                        for &x in &cols[j].1 {
                            let slope = f.mul(f.sub(x, x0), it) as usize;
                            if count[slope] == 0 {
                                touched.push(slope);
                            }
                            count[slope] += 1;
                            top = top.max(count[slope]);
                        }
                    }
                    for s in touched.drain(..) {
                        count[s] = 0;
                    }
                    best.fetch_max(1 + top as u64, Ordering::Relaxed);
                }
            }
        },
    );
    Ok(best.into_inner())
}

/// `O(|R|³)` reference for [`max_collinear`].
pub fn max_collinear_naive(field: &PrimeField, points: &[Point3]) -> u64 {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts.len() as u64;
    }
    let f = field;
    let diff = |a: &Point3, b: &Point3| [f.sub(b.x, a.x), f.sub(b.y, a.y), f.sub(b.z, a.z)];
    let parallel = |u: [u64; 3], v: [u64; 3]| {
        f.mul(u[1], v[2]) == f.mul(u[2], v[1])
            && f.mul(u[2], v[0]) == f.mul(u[0], v[2])
            && f.mul(u[0], v[1]) == f.mul(u[1], v[0])
    };
    let mut best = 2;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let u = diff(&pts[i], &pts[j]);
            let n = pts.iter().filter(|q| parallel(u, diff(&pts[i], q))).count() as u64;
            best = best.max(n);
        }
    }
    best
}

/// One evaluation of the point-plane incidence bound
/// `I ≤ |R|^{1/2}|S| + k|S|` (implied constant dropped).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RudnevRow {
    pub incidences: u64,
    pub k: u64,
    pub points: usize,
    pub planes: usize,
    pub bound: f64,
    pub ratio: f64,
    /// `|R| ≤ |S|`.
    pub points_le_planes: bool,
    /// `|R| ≤ p²`.
    pub points_le_p2: bool,
}

pub fn rudnev_ratio(cfg: &IncidenceConfig) -> Result<RudnevRow> {
    let incidences = incidences(cfg);
    let k = max_collinear(cfg.field(), cfg.points())?;
    let (r, s) = (cfg.points().len(), cfg.planes().len());
    let bound = (r as f64).sqrt() * s as f64 + k as f64 * s as f64;
    let ratio = if bound > 0.0 {
        incidences as f64 / bound
    } else {
        0.0
    };
    let p = cfg.field().p() as u128;
    Ok(RudnevRow {
        incidences,
        k,
        points: r,
        planes: s,
        bound,
        ratio,
        points_le_planes: r <= s,
        points_le_p2: r as u128 <= p * p,
    })
}

/// The four point/plane families attached to the quadruple energies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofVariant {
    /// Points `(x, g(a'), g(a')(c'+h(a')))`, planes
    /// `g(a)X - x'Y - Z + g(a)(c+h(a)) = 0`.
    SumE1,
    /// Points `(f, 1/g(a'), h(a')+x')`, planes
    /// `(1/g(a))X - f'Y + Z - h(a) - x = 0`.
    SumE2,
    /// Points `(x, g(a')c', g(a')h(a'))`, planes
    /// `g(a)cX - x'Y - Z + g(a)h(a) = 0`.
    ProdE1,
    /// Points `(f, 1/(g(a')x'), h(a')/x')`, planes
    /// `(1/(xg(a)))X - f'Y + Z - h(a)/x = 0`.
    ProdE2,
}

impl ProofVariant {
    pub fn label(self) -> &'static str {
        match self {
            ProofVariant::SumE1 => "sum_E1",
            ProofVariant::SumE2 => "sum_E2",
            ProofVariant::ProdE1 => "prod_E1",
            ProofVariant::ProdE2 => "prod_E2",
        }
    }
}

impl std::str::FromStr for ProofVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum_E1" => Ok(ProofVariant::SumE1),
            "sum_E2" => Ok(ProofVariant::SumE2),
            "prod_E1" => Ok(ProofVariant::ProdE1),
            "prod_E2" => Ok(ProofVariant::ProdE2),
            _ => Err(Error::BadParams(format!("unknown proof variant {s:?}"))),
        }
    }
}

/// A point/plane family of product shape: points `U × T` (x-coordinate from
/// `U`, `(y, z)` from `T`) and planes `X + σu'κY + κZ + d = 0` for `u' ∈ U`,
/// `(κ, d) ∈ K`, with `σ = ±1` and `κ ≠ 0`. All four proof families have
/// this shape after normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductConfig {
    field: PrimeField,
    variant: ProofVariant,
    u: Vec<u64>,
    t: Vec<(u64, u64)>,
    k: Vec<(u64, u64)>,
    negate: bool,
}

impl ProductConfig {
    pub fn variant(&self) -> ProofVariant {
        self.variant
    }

    /// The x-coordinates `U` shared by every column.
    pub fn x_values(&self) -> &[u64] {
        &self.u
    }

    /// The `(y, z)` columns `T`.
    pub fn columns(&self) -> &[(u64, u64)] {
        &self.t
    }

    pub fn num_points(&self) -> usize {
        self.u.len() * self.t.len()
    }

    pub fn num_planes(&self) -> usize {
        self.u.len() * self.k.len()
    }

    pub fn points(&self) -> Vec<Point3> {
        let mut out = Vec::with_capacity(self.num_points());
        for &x in &self.u {
            for &(y, z) in &self.t {
                out.push(Point3::new(x, y, z));
            }
        }
        out
    }

    pub fn planes(&self) -> Vec<Plane3> {
        let f = &self.field;
        let mut out = Vec::with_capacity(self.num_planes());
        for &u in &self.u {
            let su = if self.negate { f.neg(u) } else { u };
            for &(kappa, d) in &self.k {
                out.push(Plane3 {
                    a: 1,
                    b: f.mul(su, kappa),
                    c: kappa,
                    d,
                });
            }
        }
        out
    }

    pub fn to_config(&self) -> IncidenceConfig {
        IncidenceConfig::new(
            &self.field,
            self.points(),
            self.planes(),
            Some(self.variant.label().to_string()),
        )
        .expect("proof families are normalized")
    }

    /// Exact `I(R, S)` using the product shape.
    ///
    /// `I = Σ_{(κ,d)} Σ_{(y,z)} G_λ(-(κz + d))` with `λ = σκy` and
    /// `G_λ(v) = |{(u, u') ∈ U² : u + λu' = v}|`. Terms are grouped by `λ`
    /// and `G_λ` is either tabulated (pairwise or by convolution) or
    /// evaluated pointwise, whichever is cheaper for the group.
    pub fn incidences(&self) -> u64 {
        if self.u.is_empty() || self.t.is_empty() || self.k.is_empty() {
            return 0;
        }
        let f = &self.field;
        let p = f.p() as usize;
        let mut d_by_kappa: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &(kappa, d) in &self.k {
            d_by_kappa.entry(kappa).or_default().push(d);
        }
        let mut z_by_y: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &(y, z) in &self.t {
            z_by_y.entry(y).or_default().push(z);
        }
        let kappas: Vec<(u64, Vec<u64>)> = d_by_kappa.into_iter().collect();
        let ys: Vec<(u64, Vec<u64>)> = z_by_y.into_iter().collect();
        let mut groups: HashMap<u64, Vec<(u32, u32)>> = HashMap::new();
        for (i, (kappa, _)) in kappas.iter().enumerate() {
            for (j, (y, _)) in ys.iter().enumerate() {
                let mut lambda = f.mul(*kappa, *y);
                if self.negate {
                    lambda = f.neg(lambda);
                }
                groups.entry(lambda).or_default().push((i as u32, j as u32));
            }
        }
        let mut groups: Vec<(u64, Vec<(u32, u32)>)> = groups.into_iter().collect();
        groups.sort_unstable_by_key(|g| g.0);

        let mut u_mask = vec![false; p];
        for &x in &self.u {
            u_mask[x as usize] = true;
        }
        let nu = self.u.len() as u128;
        let log_p = (64 - (2 * p as u64).leading_zeros()) as u128;
        let table_cost = (nu * nu).min(12 * 2 * p as u128 * log_p);
        groups
            .par_iter()
            .map(|(lambda, pairs)| {
                let queries: u128 = pairs
                    .iter()
                    .map(|&(i, j)| (kappas[i as usize].1.len() * ys[j as usize].1.len()) as u128)
                    .sum();
                let lambda = *lambda;
                let each = |v: u64| -> u64 {
                    self.u
                        .iter()
                        .filter(|&&w| u_mask[f.sub(v, f.mul(lambda, w)) as usize])
                        .count() as u64
                };
                let table: Option<Vec<u64>> =
                    (queries * nu > table_cost).then(|| self.g_table(lambda));
                let mut acc = 0u64;
                for &(i, j) in pairs {
                    let (kappa, ds) = &kappas[i as usize];
                    let zs = &ys[j as usize].1;
                    for &z in zs {
                        let kz = f.mul(*kappa, z);
                        for &d in ds {
                            let v = f.neg(f.add(kz, d));
                            acc += match &table {
                                Some(t) => t[v as usize],
                                None => each(v),
                            };
                        }
                    }
                }
                acc
            })
            .sum()
    }

    fn g_table(&self, lambda: u64) -> Vec<u64> {
        let f = &self.field;
        let p = f.p() as usize;
        let nu = self.u.len();
        let log_p = 64 - (2 * p as u64).leading_zeros() as usize;
        if nu * nu <= 12 * 2 * p * log_p {
            let mut t = vec![0u64; p];
            for &x in &self.u {
                for &w in &self.u {
                    t[f.add(x, f.mul(lambda, w)) as usize] += 1;
                }
            }
            t
        } else {
            let mut a = vec![0u64; p];
            let mut b = vec![0u64; p];
            for &x in &self.u {
                a[x as usize] = 1;
                b[f.mul(lambda, x) as usize] = 1;
            }
            crate::conv::cyclic(&a, &b, crate::conv::ConvMethod::Transform)
                .into_iter()
                .map(|v| v as u64)
                .collect()
        }
    }
}

/// The point/plane family of `variant` as a product-shaped description.
///
/// `third` is `C` for the `E1` variants and the image `f(A, B)` for the
/// `E2` variants.
pub fn proof_config(
    variant: ProofVariant,
    a: &FSet,
    x: &FSet,
    third: &FSet,
    g: &FnTable,
    h: &FnTable,
) -> Result<ProductConfig> {
    let field = a.field();
    let p = field.p();
    for q in [x.p(), third.p(), g.field().p(), h.field().p()] {
        check_same(p, q)?;
    }
    if a.contains_zero() {
        return Err(Error::ZeroInA);
    }
    let f = field;
    let inv = |v: u64| f.inverse(v).expect("nonzero");
    let mut t = Vec::new();
    let mut k = Vec::new();
    let (u, negate) = match variant {
        ProofVariant::SumE1 => {
            for ai in a.iter() {
                let (ga, ha) = (g.get(ai), h.get(ai));
                for c in third.iter() {
                    t.push((ga, f.mul(ga, f.add(c, ha))));
                    k.push((f.neg(inv(ga)), f.add(c, ha)));
                }
            }
            (x.elements(), false)
        }
        ProofVariant::SumE2 => {
            for ai in a.iter() {
                let (ga, ha) = (g.get(ai), h.get(ai));
                for xi in x.iter() {
                    t.push((inv(ga), f.add(ha, xi)));
                    k.push((ga, f.neg(f.mul(ga, f.add(ha, xi)))));
                }
            }
            (third.elements(), true)
        }
        ProofVariant::ProdE1 => {
            if third.contains_zero() {
                return Err(Error::ZeroDivisor);
            }
            for ai in a.iter() {
                let (ga, ha) = (g.get(ai), h.get(ai));
                for c in third.iter() {
                    t.push((f.mul(ga, c), f.mul(ga, ha)));
                    k.push((f.neg(inv(f.mul(ga, c))), f.mul(ha, inv(c))));
                }
            }
            (x.elements(), false)
        }
        ProofVariant::ProdE2 => {
            if x.contains_zero() {
                return Err(Error::ZeroDivisor);
            }
            for ai in a.iter() {
                let (ga, ha) = (g.get(ai), h.get(ai));
                for xi in x.iter() {
                    t.push((inv(f.mul(ga, xi)), f.mul(ha, inv(xi))));
                    k.push((f.mul(xi, ga), f.neg(f.mul(ga, ha))));
                }
            }
            (third.elements(), true)
        }
    };
    t.sort_unstable();
    t.dedup();
    k.sort_unstable();
    k.dedup();
    Ok(ProductConfig {
        field: field.clone(),
        variant,
        u,
        t,
        k,
        negate,
    })
}

/// The point/plane family of `variant`, deduplicated, as an explicit
/// configuration.
pub fn build_proof_config(
    variant: ProofVariant,
    a: &FSet,
    x: &FSet,
    third: &FSet,
    g: &FnTable,
    h: &FnTable,
) -> Result<IncidenceConfig> {
    Ok(proof_config(variant, a, x, third, g, h)?.to_config())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{make_fn, FnSpec};
    use crate::rng::{sample_subset, stream_rng};
    use rand::Rng;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn all_points(p: u64) -> Vec<Point3> {
        let mut v = Vec::new();
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    v.push(Point3::new(x, y, z));
                }
            }
        }
        v
    }

    fn random_plane(field: &PrimeField, rng: &mut impl Rng) -> Plane3 {
        let p = field.p();
        loop {
            let (a, b, c, d) = (
                rng.gen_range(0..p),
                rng.gen_range(0..p),
                rng.gen_range(0..p),
                rng.gen_range(0..p),
            );
            if let Ok(pl) = Plane3::new(field, a, b, c, d) {
                return pl;
            }
        }
    }

    #[test]
    fn plane_normalization() {
        let f7 = f(7);
        assert_eq!(
            Plane3::new(&f7, 2, 4, 6, 1).unwrap(),
            Plane3 {
                a: 1,
                b: 2,
                c: 3,
                d: 4
            }
        );
        assert_eq!(
            Plane3::new(&f7, 0, 3, 3, 3).unwrap(),
            Plane3 {
                a: 0,
                b: 1,
                c: 1,
                d: 1
            }
        );
        assert!(Plane3::new(&f7, 0, 0, 0, 1).is_err());
    }

    #[test]
    fn incidence_examples() {
        let f3 = f(3);
        let z0 = Plane3::new(&f3, 0, 0, 1, 0).unwrap();
        let cfg = IncidenceConfig::new(&f3, all_points(3), vec![z0], None).unwrap();
        assert_eq!(incidences(&cfg), 9);
        let cfg = IncidenceConfig::new(&f3, vec![Point3::new(0, 0, 0)], vec![z0], None).unwrap();
        assert_eq!(incidences(&cfg), 1);
        let f5 = f(5);
        let diag: Vec<_> = (0..5).map(|t| Point3::new(t, t, t)).collect();
        let pl = Plane3::new(&f5, 1, 4, 0, 0).unwrap();
        let cfg = IncidenceConfig::new(&f5, diag.clone(), vec![pl], None).unwrap();
        assert_eq!(incidences(&cfg), 5);
        assert_eq!(max_collinear(&f5, &diag).unwrap(), 5);
        assert_eq!(max_collinear(&f5, &diag[..1]).unwrap(), 1);
        let tri = [
            Point3::new(0, 0, 0),
            Point3::new(1, 0, 0),
            Point3::new(0, 1, 0),
        ];
        assert_eq!(max_collinear(&f3, &tri).unwrap(), 2);
        assert_eq!(max_collinear(&f3, &[]).unwrap(), 0);
    }

    #[test]
    fn full_space_counts_p_squared_per_plane() {
        for p in [3u64, 5, 7] {
            let field = f(p);
            let mut rng = stream_rng(3, p);
            let planes: Vec<_> = (0..20).map(|_| random_plane(&field, &mut rng)).collect();
            let cfg = IncidenceConfig::new(&field, all_points(p), planes, None).unwrap();
            assert_eq!(incidences(&cfg), cfg.planes().len() as u64 * p * p);
        }
    }

    #[test]
    fn rudnev_examples() {
        let f3 = f(3);
        let z0 = Plane3::new(&f3, 0, 0, 1, 0).unwrap();
        let row = rudnev_ratio(&IncidenceConfig::new(&f3, all_points(3), vec![z0], None).unwrap())
            .unwrap();
        assert_eq!((row.incidences, row.k), (9, 3));
        assert!((row.bound - (27f64.sqrt() + 3.0)).abs() < 1e-12);
        assert!((row.ratio - 1.098).abs() < 1e-3);
        assert!(!row.points_le_planes && !row.points_le_p2);
        let one = IncidenceConfig::new(&f3, vec![Point3::new(0, 0, 0)], vec![z0], None).unwrap();
        assert_eq!(rudnev_ratio(&one).unwrap().ratio, 0.5);
    }

    #[test]
    fn fast_counts_match_naive_on_random_configs() {
        for i in 0..60u64 {
            let p = [5u64, 7, 11, 13][i as usize % 4];
            let field = f(p);
            let mut rng = stream_rng(17, i);
            let n = rng.gen_range(1..60);
            let mut pts: Vec<Point3> = (0..n)
                .map(|_| {
                    Point3::new(
                        rng.gen_range(0..p),
                        rng.gen_range(0..p),
                        rng.gen_range(0..p),
                    )
                })
                .collect();
            // plant some collinear structure
            if i % 3 == 0 {
                let (o, d) = (
                    [
                        rng.gen_range(0..p),
                        rng.gen_range(0..p),
                        rng.gen_range(0..p),
                    ],
                    [1, rng.gen_range(0..p), rng.gen_range(0..p)],
                );
                for t in 0..p {
                    pts.push(Point3::new(
                        (o[0] + t * d[0]) % p,
                        (o[1] + t * d[1]) % p,
                        (o[2] + t * d[2]) % p,
                    ));
                }
            }
            let planes: Vec<_> = (0..rng.gen_range(1..80))
                .map(|_| random_plane(&field, &mut rng))
                .collect();
            let cfg = IncidenceConfig::new(&field, pts, planes, None).unwrap();
            assert_eq!(incidences(&cfg), incidences_naive(&cfg), "instance {i}");
            assert_eq!(
                max_collinear(&field, cfg.points()).unwrap(),
                max_collinear_naive(&field, cfg.points()),
                "instance {i}"
            );
        }
    }

    #[test]
    fn incidences_are_affine_invariant() {
        let field = f(11);
        let mut rng = stream_rng(23, 0);
        let pts: Vec<_> = (0..80)
            .map(|_| {
                Point3::new(
                    rng.gen_range(0..11),
                    rng.gen_range(0..11),
                    rng.gen_range(0..11),
                )
            })
            .collect();
        let planes: Vec<_> = (0..80).map(|_| random_plane(&field, &mut rng)).collect();
        let cfg = IncidenceConfig::new(&field, pts.clone(), planes.clone(), None).unwrap();
        // (x, y, z) -> (x + 2y + 3, y + 5z, 4z + 1); planes transform by the inverse transpose.
        let fl = &field;
        let map = |q: &Point3| {
            Point3::new(
                fl.add(fl.add(q.x, fl.mul(2, q.y)), 3),
                fl.add(q.y, fl.mul(5, q.z)),
                fl.add(fl.mul(4, q.z), 1),
            )
        };
        let pts2: Vec<_> = pts.iter().map(map).collect();
        // The plane n·v + d = 0 maps to n·M⁻¹(w - t) + d = 0 with
        // M = [[1,2,0],[0,1,5],[0,0,4]] and t = (3,0,1).
        let planes2: Vec<_> = planes
            .iter()
            .map(|pl| {
                let i4 = fl.inverse(4).unwrap();
                let (n1, n2, n3) = (pl.a, pl.b, pl.c);
                let m_inv = [
                    [1, fl.neg(2), fl.mul(10, i4)],
                    [0, 1, fl.neg(fl.mul(5, i4))],
                    [0, 0, i4],
                ];
                let r = |j: usize| {
                    fl.add(
                        fl.add(fl.mul(n1, m_inv[0][j]), fl.mul(n2, m_inv[1][j])),
                        fl.mul(n3, m_inv[2][j]),
                    )
                };
                let (a, b, c) = (r(0), r(1), r(2));
                let d = fl.sub(pl.d, fl.add(fl.mul(a, 3), c));
                Plane3::new(fl, a, b, c, d).unwrap()
            })
            .collect();
        let cfg2 = IncidenceConfig::new(&field, pts2, planes2, None).unwrap();
        assert_eq!(incidences(&cfg), incidences_naive(&cfg2));
        assert_eq!(incidences(&cfg), incidences(&cfg2));
    }

    #[test]
    fn proof_config_example() {
        let f7 = f(7);
        let id = make_fn(&f7, &FnSpec::Identity).unwrap();
        let one = make_fn(&f7, &FnSpec::Const(1)).unwrap();
        let s = |xs: &[u64]| FSet::from_elements(&f7, xs.iter().copied()).unwrap();
        let cfg = build_proof_config(
            ProofVariant::SumE1,
            &s(&[1, 2]),
            &s(&[1]),
            &s(&[3]),
            &id,
            &one,
        )
        .unwrap();
        assert_eq!(cfg.points(), &[Point3::new(1, 1, 4), Point3::new(1, 2, 1)]);
        // X - Y - Z + 4 = 0 and 2X - Y - Z + 1 = 0, normalized.
        let expect = vec![
            Plane3::new(&f7, 1, 6, 6, 4).unwrap(),
            Plane3::new(&f7, 2, 6, 6, 1).unwrap(),
        ];
        let mut got = cfg.planes().to_vec();
        got.sort();
        let mut expect = expect;
        expect.sort();
        assert_eq!(got, expect);
        let single =
            build_proof_config(ProofVariant::SumE1, &s(&[3]), &s(&[5]), &s(&[2]), &id, &one)
                .unwrap();
        assert_eq!((single.points().len(), single.planes().len()), (1, 1));
        assert!(matches!(
            build_proof_config(ProofVariant::SumE1, &s(&[0]), &s(&[1]), &s(&[1]), &id, &one),
            Err(Error::ZeroInA)
        ));
        assert!(matches!(
            build_proof_config(
                ProofVariant::ProdE2,
                &s(&[1]),
                &s(&[0]),
                &s(&[1]),
                &id,
                &one
            ),
            Err(Error::ZeroDivisor)
        ));
    }

    #[test]
    fn product_count_matches_generic_count() {
        for i in 0..40u64 {
            let p = [7u64, 11, 13, 31][i as usize % 4];
            let field = f(p);
            let mut rng = stream_rng(29, i);
            let mut pick = |lo: u64, n: usize| {
                FSet::from_elements(
                    &field,
                    sample_subset(&mut rng, lo, p, n.min((p - lo) as usize)),
                )
                .unwrap()
            };
            let a = pick(1, 1 + i as usize % 4);
            let x = pick(1, 1 + i as usize % 5);
            let third = pick(1, 2 + i as usize % 6);
            let g = FnSpec::Random(Some(i)).build(&field, 0, 0).unwrap();
            let h = FnSpec::Random(Some(i + 100)).build(&field, 0, 0).unwrap();
            for v in [
                ProofVariant::SumE1,
                ProofVariant::SumE2,
                ProofVariant::ProdE1,
                ProofVariant::ProdE2,
            ] {
                let pc = proof_config(v, &a, &x, &third, &g, &h).unwrap();
                let cfg = pc.to_config();
                assert_eq!(cfg.points().len(), pc.num_points());
                assert_eq!(cfg.planes().len(), pc.num_planes());
                let naive = incidences_naive(&cfg);
                assert_eq!(incidences(&cfg), naive, "{v:?} instance {i}");
                assert_eq!(pc.incidences(), naive, "{v:?} instance {i}");
            }
        }
    }
}
