//! Plain-text formats.
//!
//! Every file starts with a `p=<modulus>` line; blank lines and `#`
//! comments are ignored everywhere.
//!
//! - set: one element per line, strictly increasing;
//! - function table: `p-1` lines `x value`, one for each `x = 1..p-1`;
//! - points: lines `x y z`;
//! - planes: lines `a b c d` for `aX + bY + cZ + d = 0`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field::{PrimeField, MAX_P};
use crate::functions::FnTable;
use crate::incidence::{Plane3, Point3};
use crate::sets::FSet;

struct Lines<'a> {
    path: Option<PathBuf>,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, path: Option<&Path>) -> Self {
        Self {
            path: path.map(Path::to_path_buf),
            inner: text.lines().enumerate(),
        }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            msg: msg.into(),
        }
    }

    /// Next content line as `(1-based line number, trimmed text)`.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let text = match raw.find('#') {
                Some(k) => &raw[..k],
                None => raw,
            }
            .trim();
            if !text.is_empty() {
                return Some((i + 1, text));
            }
        }
        None
    }

    fn header(&mut self, cap: u64) -> Result<PrimeField> {
        let (n, text) = self
            .next_content()
            .ok_or_else(|| self.err(1, "missing `p=<modulus>` header"))?;
        let p = text
            .strip_prefix("p=")
            .and_then(|v| v.trim().parse::<u64>().ok())
            .ok_or_else(|| self.err(n, format!("expected `p=<modulus>`, found {text:?}")))?;
        PrimeField::with_cap(p, cap).map_err(|e| self.err(n, e.to_string()))
    }

    fn numbers<const N: usize>(&self, n: usize, text: &str, p: u64) -> Result<[u64; N]> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != N {
            return Err(self.err(n, format!("expected {N} fields, found {}", parts.len())));
        }
        let mut out = [0u64; N];
        for (slot, s) in out.iter_mut().zip(parts) {
            let v: u64 = s
                .parse()
                .map_err(|_| self.err(n, format!("not a residue: {s:?}")))?;
            if v >= p {
                return Err(self.err(n, format!("{v} is not below p = {p}")));
            }
            *slot = v;
        }
        Ok(out)
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

/// Parses a set file, rejecting duplicates, out-of-range and unsorted
/// elements. `cap` bounds the modulus.
pub fn parse_set(text: &str, path: Option<&Path>, cap: u64) -> Result<FSet> {
    let mut lines = Lines::new(text, path);
    let field = lines.header(cap)?;
    let p = field.p();
    let mut elems = Vec::new();
    while let Some((n, t)) = lines.next_content() {
        let [v] = lines.numbers::<1>(n, t, p)?;
        if let Some(&last) = elems.last() {
            if v == last {
                return Err(lines.err(n, format!("duplicate element {v}")));
            }
            if v < last {
                return Err(lines.err(n, format!("elements must increase ({v} after {last})")));
            }
        }
        elems.push(v);
    }
    FSet::from_elements(&field, elems)
}

pub fn read_set(path: &Path) -> Result<FSet> {
    parse_set(&read(path)?, Some(path), MAX_P)
}

pub fn read_set_capped(path: &Path, cap: u64) -> Result<FSet> {
    parse_set(&read(path)?, Some(path), cap)
}

pub fn format_set(set: &FSet) -> String {
    let mut out = format!("p={}\n", set.p());
    for x in set.iter() {
        writeln!(out, "{x}").unwrap();
    }
    out
}

pub fn write_set(path: &Path, set: &FSet) -> Result<()> {
    Ok(fs::write(path, format_set(set))?)
}

pub fn parse_fn_table(text: &str, path: Option<&Path>, cap: u64) -> Result<FnTable> {
    let mut lines = Lines::new(text, path);
    let field = lines.header(cap)?;
    let p = field.p();
    let mut values = vec![0u64; p as usize - 1];
    let mut last_line = 1;
    while let Some((n, t)) = lines.next_content() {
        last_line = n;
        let [x, v] = lines.numbers::<2>(n, t, p)?;
        if x == 0 {
            return Err(lines.err(n, "functions are defined on 1..p-1"));
        }
        if v == 0 {
            return Err(lines.err(n, format!("value 0 at x={x}; codomain must be F_p^*")));
        }
        let slot = &mut values[x as usize - 1];
        if *slot != 0 {
            return Err(lines.err(n, format!("x={x} given twice")));
        }
        *slot = v;
    }
    if let Some(i) = values.iter().position(|&v| v == 0) {
        return Err(lines.err(last_line, format!("no value for x={}", i + 1)));
    }
    FnTable::from_values(&field, &values)
}

pub fn read_fn_table(path: &Path) -> Result<FnTable> {
    parse_fn_table(&read(path)?, Some(path), MAX_P)
}

pub fn format_fn_table(g: &FnTable) -> String {
    let mut out = format!("p={}\n", g.field().p());
    for (x, v) in g.iter() {
        writeln!(out, "{x} {v}").unwrap();
    }
    out
}

pub fn write_fn_table(path: &Path, g: &FnTable) -> Result<()> {
    Ok(fs::write(path, format_fn_table(g))?)
}

pub fn parse_points(
    text: &str,
    path: Option<&Path>,
    cap: u64,
) -> Result<(PrimeField, Vec<Point3>)> {
    let mut lines = Lines::new(text, path);
    let field = lines.header(cap)?;
    let mut pts = Vec::new();
    while let Some((n, t)) = lines.next_content() {
        let [x, y, z] = lines.numbers::<3>(n, t, field.p())?;
        pts.push(Point3::new(x, y, z));
    }
    Ok((field, pts))
}

pub fn read_points(path: &Path, cap: u64) -> Result<(PrimeField, Vec<Point3>)> {
    parse_points(&read(path)?, Some(path), cap)
}

/// Parses planes and normalizes each one.
pub fn parse_planes(
    text: &str,
    path: Option<&Path>,
    cap: u64,
) -> Result<(PrimeField, Vec<Plane3>)> {
    let mut lines = Lines::new(text, path);
    let field = lines.header(cap)?;
    let mut planes = Vec::new();
    while let Some((n, t)) = lines.next_content() {
        let [a, b, c, d] = lines.numbers::<4>(n, t, field.p())?;
        planes.push(Plane3::new(&field, a, b, c, d).map_err(|e| lines.err(n, e.to_string()))?);
    }
    Ok((field, planes))
}

pub fn read_planes(path: &Path, cap: u64) -> Result<(PrimeField, Vec<Plane3>)> {
    parse_planes(&read(path)?, Some(path), cap)
}

pub fn format_points(p: u64, pts: &[Point3]) -> String {
    let mut out = format!("p={p}\n");
    for q in pts {
        writeln!(out, "{} {} {}", q.x, q.y, q.z).unwrap();
    }
    out
}

pub fn format_planes(p: u64, planes: &[Plane3]) -> String {
    let mut out = format!("p={p}\n");
    for pl in planes {
        writeln!(out, "{} {} {} {}", pl.a, pl.b, pl.c, pl.d).unwrap();
    }
    out
}
