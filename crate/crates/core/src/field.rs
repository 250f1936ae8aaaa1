//! Arithmetic in the prime field F_p together with the multiplicative
//! structure (primitive root, discrete-log table) that the transform paths
//! need.
//!
//! Elements are plain `u64` values kept in canonical form `0..p`. The moduli
//! handled here are small (at most [`MAX_P`]), so every product fits in a
//! `u64` without reduction tricks.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Hard upper bound on the modulus. The discrete-log table and every dense
/// histogram are arrays of length `p`.
pub const MAX_P: u64 = 1 << 20;

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Distinct prime factors of `n` in increasing order.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

struct Inner {
    p: u64,
    root: u64,
    // exp_table[i] = root^i, dlog_table[root^i] = i; built together on first use.
    tables: OnceLock<(Vec<u32>, Vec<u32>)>,
}

/// The field F_p. Cheap to clone; all clones share one discrete-log table.
#[derive(Clone)]
pub struct PrimeField {
    inner: Arc<Inner>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeField")
            .field("p", &self.inner.p)
            .field("root", &self.inner.root)
            .finish()
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p
    }
}

impl Eq for PrimeField {}

impl PrimeField {
    /// Builds F_p with the default cap [`MAX_P`].
    pub fn new(p: u64) -> Result<Self> {
        Self::with_cap(p, MAX_P)
    }

    /// Builds F_p, rejecting moduli above `cap` (which is itself clamped to
    /// [`MAX_P`]).
    pub fn with_cap(p: u64, cap: u64) -> Result<Self> {
        if p < 3 {
            return Err(Error::TooSmall(p));
        }
        let cap = cap.min(MAX_P);
        if p > cap {
            return Err(Error::TooLarge { p, cap });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let root = primitive_root(p);
        Ok(Self {
            inner: Arc::new(Inner {
                p,
                root,
                tables: OnceLock::new(),
            }),
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.inner.p
    }

    /// The primitive root in use (the smallest one).
    #[inline]
    pub fn root(&self) -> u64 {
        self.inner.root
    }

    /// Order of the multiplicative group, `p - 1`.
    #[inline]
    pub fn group_order(&self) -> u64 {
        self.inner.p - 1
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.inner.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.inner.p {
            s - self.inner.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.inner.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.inner.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.inner.p
    }

    pub fn inverse(&self, x: u64) -> Result<u64> {
        let x = x % self.inner.p;
        if x == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(pow_mod_u64(x, self.inner.p - 2, self.inner.p))
    }

    /// `a / b`, failing on `b = 0`.
    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inverse(b)?))
    }

    /// `x^e` with negative exponents going through the inverse.
    pub fn pow(&self, x: u64, e: i64) -> Result<u64> {
        let x = x % self.inner.p;
        if e < 0 {
            let inv = self.inverse(x)?;
            Ok(pow_mod_u64(inv, e.unsigned_abs(), self.inner.p))
        } else {
            Ok(pow_mod_u64(x, e as u64, self.inner.p))
        }
    }

    fn tables(&self) -> &(Vec<u32>, Vec<u32>) {
        self.inner.tables.get_or_init(|| {
            let p = self.inner.p;
            let n = (p - 1) as usize;
            let mut exp = Vec::with_capacity(n);
            let mut dlog = vec![u32::MAX; p as usize];
            let mut cur = 1u64;
            for i in 0..n {
                exp.push(cur as u32);
                dlog[cur as usize] = i as u32;
                cur = cur * self.inner.root % p;
            }
            (exp, dlog)
        })
    }

    /// Discrete logarithm to base [`root`](Self::root), in `0..p-1`.
    pub fn dlog(&self, x: u64) -> Result<u64> {
        let x = x % self.inner.p;
        if x == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.tables().1[x as usize] as u64)
    }

    /// `root^i` for `i` taken modulo `p - 1`.
    pub fn exp(&self, i: u64) -> u64 {
        self.tables().0[(i % (self.inner.p - 1)) as usize] as u64
    }

    /// The full discrete-log table indexed by element (entry 0 is unused).
    pub fn dlog_table(&self) -> &[u32] {
        &self.tables().1
    }

    /// The power table `root^0, root^1, ..., root^(p-2)`.
    pub fn exp_table(&self) -> &[u32] {
        &self.tables().0
    }
}

/// Smallest primitive root of the prime `p`, found by testing 2, 3, 4, ...
/// against the prime factors of `p - 1`.
pub fn primitive_root(p: u64) -> u64 {
    let factors = distinct_prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod_u64(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}
