//! Exact integer convolution.
//!
//! Inputs are nonnegative integer sequences; outputs are exact `u128`
//! sequences. The transform path runs a number-theoretic transform modulo
//! one, two or three NTT-friendly primes, picking the count from an a-priori
//! bound on the output coefficients, and recombines residues by CRT. Cyclic
//! convolutions of arbitrary length (in particular `p - 1`, which is never a
//! power of two) are obtained by zero-padding to a power of two and folding.

/// `(modulus, generator)` pairs; each modulus is `c * 2^k + 1` with `k >= 23`.
const PRIMES: [(u64, u64); 3] = [(998_244_353, 3), (167_772_161, 3), (469_762_049, 3)];

/// Largest transform length supported by all three primes.
pub const MAX_NTT_LEN: usize = 1 << 23;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn ntt(a: &mut [u64], m: u64, g: u64, invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(g, (m - 1) / len as u64, m);
        if invert {
            w = pow_mod(w, m - 2, m);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut t = 1u64;
        for _ in 0..half {
            twiddles.push(t);
            t = t * w % m;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let x = *u;
                let y = *v * tw % m;
                *u = if x + y >= m { x + y - m } else { x + y };
                *v = if x >= y { x - y } else { x + m - y };
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = pow_mod(n as u64, m - 2, m);
        a.iter_mut().for_each(|x| *x = *x * n_inv % m);
    }
}

fn convolve_mod(a: &[u64], b: &[u64], size: usize, (m, g): (u64, u64)) -> Vec<u64> {
    let mut fa = vec![0u64; size];
    let mut fb = vec![0u64; size];
    for (dst, &x) in fa.iter_mut().zip(a) {
        *dst = x % m;
    }
    for (dst, &x) in fb.iter_mut().zip(b) {
        *dst = x % m;
    }
    ntt(&mut fa, m, g, false);
    ntt(&mut fb, m, g, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % m;
    }
    ntt(&mut fa, m, g, true);
    fa
}

/// A-priori bound on every coefficient of `a * b`.
fn coefficient_bound(a: &[u64], b: &[u64]) -> u128 {
    let sum = |v: &[u64]| v.iter().map(|&x| x as u128).sum::<u128>();
    let max = |v: &[u64]| v.iter().copied().max().unwrap_or(0) as u128;
    let (sa, sb, ma, mb) = (sum(a), sum(b), max(a), max(b));
    sa.saturating_mul(mb).min(sb.saturating_mul(ma))
}

/// Which algorithm computes a convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvMethod {
    /// Direct `O(n m)` summation over nonzero entries.
    Schoolbook,
    /// Number-theoretic transform with CRT recombination.
    Transform,
}

/// Exact linear convolution by direct summation over nonzero entries.
pub fn linear_schoolbook(a: &[u64], b: &[u64]) -> Vec<u128> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    let nz_b: Vec<(usize, u128)> = b
        .iter()
        .enumerate()
        .filter(|(_, &y)| y != 0)
        .map(|(j, &y)| (j, y as u128))
        .collect();
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let x = x as u128;
        for &(j, y) in &nz_b {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact linear convolution through the NTT.
///
/// Panics if the output length exceeds [`MAX_NTT_LEN`] or the coefficient
/// bound exceeds what three primes can represent; neither happens for the
/// moduli this crate admits.
pub fn linear_transform(a: &[u64], b: &[u64]) -> Vec<u128> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    assert!(
        size <= MAX_NTT_LEN,
        "convolution length {out_len} too large"
    );
    let bound = coefficient_bound(a, b);
    let m0 = PRIMES[0].0 as u128;
    let m1 = PRIMES[1].0 as u128;
    let m2 = PRIMES[2].0 as u128;
    let r0 = convolve_mod(a, b, size, PRIMES[0]);
    if bound < m0 {
        return r0[..out_len].iter().map(|&x| x as u128).collect();
    }
    let r1 = convolve_mod(a, b, size, PRIMES[1]);
    // x = r0 + m0 * ((r1 - r0) * m0^-1 mod m1)
    let inv_m0_m1 = pow_mod(PRIMES[0].0 % PRIMES[1].0, PRIMES[1].0 - 2, PRIMES[1].0) as u128;
    let two: Vec<u128> = (0..out_len)
        .map(|i| {
            let (x0, x1) = (r0[i] as u128, r1[i] as u128);
            let t = ((x1 + m1 - x0 % m1) % m1) * inv_m0_m1 % m1;
            x0 + m0 * t
        })
        .collect();
    if bound < m0 * m1 {
        return two;
    }
    assert!(bound < m0 * m1 * m2, "coefficient bound {bound} too large");
    let r2 = convolve_mod(a, b, size, PRIMES[2]);
    let m01 = m0 * m1;
    let inv_m01_m2 = pow_mod((m01 % m2) as u64, PRIMES[2].0 - 2, PRIMES[2].0) as u128;
    two.into_iter()
        .zip(&r2)
        .map(|(x01, &x2)| {
            let x2 = x2 as u128;
            let t = ((x2 + m2 - x01 % m2) % m2) * inv_m01_m2 % m2;
            x01 + m01 * t
        })
        .collect()
}

/// Exact linear convolution by the requested method.
pub fn linear(a: &[u64], b: &[u64], method: ConvMethod) -> Vec<u128> {
    match method {
        ConvMethod::Schoolbook => linear_schoolbook(a, b),
        ConvMethod::Transform => linear_transform(a, b),
    }
}

/// Exact cyclic convolution of two length-`n` sequences:
/// `out[k] = sum_{i + j = k mod n} a[i] b[j]`.
pub fn cyclic(a: &[u64], b: &[u64], method: ConvMethod) -> Vec<u128> {
    let n = a.len();
    assert_eq!(n, b.len(), "cyclic convolution needs equal lengths");
    let lin = linear(a, b, method);
    let mut out = vec![0u128; n];
    for (k, v) in lin.into_iter().enumerate() {
        out[k % n] += v;
    }
    out
}
