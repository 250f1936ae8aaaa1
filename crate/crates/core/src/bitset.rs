//! Fixed-length bit vector used as the membership mask of a set of residues.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Sets bit `i`, returning whether it was previously clear.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        debug_assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// `|self ∩ other|`.
    pub fn and_count(&self, other: &BitSet) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Cyclic rotation: bit `i` of `self` lands on bit `(i + k) mod len`.
    pub fn rotated(&self, k: usize) -> BitSet {
        let mut out = BitSet::new(self.len);
        self.rotate_into(k, &mut out);
        out
    }

    /// Like [`rotated`](Self::rotated) but reuses `out`'s allocation.
    pub fn rotate_into(&self, k: usize, out: &mut BitSet) {
        let n = self.len;
        debug_assert_eq!(out.len, n);
        out.words.iter_mut().for_each(|w| *w = 0);
        if n == 0 {
            return;
        }
        let k = k % n;
        // Bits [0, n-k) move up by k; bits [n-k, n) wrap to [0, k).
        shift_or(&self.words, 0, n - k, k, &mut out.words);
        shift_or(&self.words, n - k, n, 0, &mut out.words);
    }
}

/// ORs bits `[from, to)` of `src` into `dst` starting at bit `at`.
fn shift_or(src: &[u64], from: usize, to: usize, at: usize, dst: &mut [u64]) {
    let mut i = from;
    let mut j = at;
    while i < to {
        let (sw, sb) = (i / 64, i % 64);
        let (dw, db) = (j / 64, j % 64);
        let take = (64 - sb).min(64 - db).min(to - i);
        let mask = if take == 64 {
            u64::MAX
        } else {
            (1u64 << take) - 1
        };
        let chunk = (src[sw] >> sb) & mask;
        dst[dw] |= chunk << db;
        i += take;
        j += take;
    }
}
