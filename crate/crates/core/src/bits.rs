//! Word-packed bit buffers and two dimensional bit tables.
//!
//! Everything above this module works on whole 64-bit words. Lengths are
//! padded up to a multiple of [`WORD_BITS`] and the padding bits are kept at
//! zero, so population counts and xors never need masking.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Bits per storage word.
pub const WORD_BITS: usize = 64;

/// Number of words needed to hold `num_bits` bits.
#[inline]
pub fn words_for(num_bits: usize) -> usize {
    num_bits.div_ceil(WORD_BITS)
}

#[inline]
pub fn xor_words(dst: &mut [u64], src: &[u64]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
pub fn words_are_zero(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

#[inline]
pub fn popcount_words(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub fn get_bit(words: &[u64], k: usize) -> bool {
    (words[k / WORD_BITS] >> (k % WORD_BITS)) & 1 == 1
}

#[inline]
pub fn set_bit(words: &mut [u64], k: usize, value: bool) {
    let mask = 1u64 << (k % WORD_BITS);
    if value {
        words[k / WORD_BITS] |= mask;
    } else {
        words[k / WORD_BITS] &= !mask;
    }
}

#[inline]
pub fn toggle_bit(words: &mut [u64], k: usize) {
    words[k / WORD_BITS] ^= 1u64 << (k % WORD_BITS);
}

/// Mask selecting the valid bits of the final word of a `num_bits` buffer.
#[inline]
fn tail_mask(num_bits: usize) -> u64 {
    match num_bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Iterates the indices of set bits in ascending order.
pub fn iter_ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * WORD_BITS + t)
        })
    })
}

/// A fixed length, zero padded, word-packed bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitBuffer {
    len: usize,
    words: Vec<u64>,
}

impl BitBuffer {
    pub fn zeros(len: usize) -> Self {
        BitBuffer {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (k, &b) in bits.iter().enumerate() {
            if b {
                out.set(k, true);
            }
        }
        out
    }

    /// Fills every bit with a fair coin flip.
    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut out = Self::zeros(len);
        out.randomize(rng);
        out
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

    /// Raw word access. Callers must leave the padding bits at zero.
    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.len, "bit {k} out of range for length {}", self.len);
        get_bit(&self.words, k)
    }

    #[inline]
    pub fn set(&mut self, k: usize, value: bool) {
        assert!(k < self.len, "bit {k} out of range for length {}", self.len);
        set_bit(&mut self.words, k, value)
    }

    #[inline]
    pub fn toggle(&mut self, k: usize) {
        assert!(k < self.len, "bit {k} out of range for length {}", self.len);
        toggle_bit(&mut self.words, k)
    }

    /// `self ^= other`, bitwise.
    pub fn xor_into(&mut self, other: &BitBuffer) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        xor_words(&mut self.words, &other.words);
        Ok(())
    }

    pub fn popcount(&self) -> usize {
        popcount_words(&self.words)
    }

    pub fn is_zero(&self) -> bool {
        words_are_zero(&self.words)
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    /// Flips every bit inside the length, leaving padding untouched.
    pub fn invert(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.clear_padding();
    }

    pub fn randomize<R: RngCore + ?Sized>(&mut self, rng: &mut R) {
        for w in &mut self.words {
            *w = rng.random();
        }
        self.clear_padding();
    }

    pub fn swap_with(&mut self, other: &mut BitBuffer) {
        assert_eq!(self.len, other.len);
        std::mem::swap(&mut self.words, &mut other.words);
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        iter_ones(&self.words)
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|k| self.get(k)).collect()
    }

    fn clear_padding(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }
}

impl std::fmt::Debug for BitBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = (0..self.len)
            .map(|k| if self.get(k) { '1' } else { '0' })
            .collect();
        write!(f, "BitBuffer({s})")
    }
}

/// A two dimensional table of bits with contiguous rows.
///
/// Entry `(major, minor)` is bit `minor` of row `major`. The minor axis is
/// padded to a multiple of [`WORD_BITS`].
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitTable {
    num_major: usize,
    num_minor: usize,
    row_words: usize,
    data: Vec<u64>,
}

impl BitTable {
    pub fn zeros(num_major: usize, num_minor: usize) -> Self {
        let row_words = words_for(num_minor);
        BitTable {
            num_major,
            num_minor,
            row_words,
            data: vec![0; num_major * row_words],
        }
    }

    /// Square table with ones on the diagonal.
    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n, n);
        for k in 0..n {
            t.set(k, k, true);
        }
        t
    }

    pub fn random<R: RngCore + ?Sized>(num_major: usize, num_minor: usize, rng: &mut R) -> Self {
        let mut t = Self::zeros(num_major, num_minor);
        let mask = tail_mask(num_minor);
        for m in 0..num_major {
            let row = t.row_mut(m);
            for w in row.iter_mut() {
                *w = rng.random();
            }
            if let Some(last) = row.last_mut() {
                *last &= mask;
            }
        }
        t
    }

    #[inline]
    pub fn num_major(&self) -> usize {
        self.num_major
    }

    #[inline]
    pub fn num_minor(&self) -> usize {
        self.num_minor
    }

    #[inline]
    pub fn row_words(&self) -> usize {
        self.row_words
    }

    #[inline]
    pub fn row(&self, major: usize) -> &[u64] {
        let w = self.row_words;
        &self.data[major * w..(major + 1) * w]
    }

    #[inline]
    pub fn row_mut(&mut self, major: usize) -> &mut [u64] {
        let w = self.row_words;
        &mut self.data[major * w..(major + 1) * w]
    }

    /// Mutable access to two distinct rows at once.
    pub fn two_rows_mut(&mut self, a: usize, b: usize) -> (&mut [u64], &mut [u64]) {
        assert_ne!(a, b, "rows must be distinct");
        let w = self.row_words;
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * w);
            (&mut lo[a * w..(a + 1) * w], &mut hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * w);
            (&mut hi[..w], &mut lo[b * w..(b + 1) * w])
        }
    }

    #[inline]
    pub fn get(&self, major: usize, minor: usize) -> bool {
        debug_assert!(major < self.num_major && minor < self.num_minor);
        get_bit(self.row(major), minor)
    }

    #[inline]
    pub fn set(&mut self, major: usize, minor: usize, value: bool) {
        debug_assert!(major < self.num_major && minor < self.num_minor);
        set_bit(self.row_mut(major), minor, value)
    }

    #[inline]
    pub fn toggle(&mut self, major: usize, minor: usize) {
        debug_assert!(major < self.num_major && minor < self.num_minor);
        toggle_bit(self.row_mut(major), minor)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            let (ra, rb) = self.two_rows_mut(a, b);
            ra.swap_with_slice(rb);
        }
    }

    pub fn clear(&mut self) {
        self.data.fill(0);
    }

    /// Copies a row out as an owned buffer.
    pub fn row_buffer(&self, major: usize) -> BitBuffer {
        BitBuffer {
            len: self.num_minor,
            words: self.row(major).to_vec(),
        }
    }

    /// Transposes a square table.
    pub fn transpose_square(&self) -> Result<BitTable> {
        if self.num_major != self.num_minor {
            return Err(Error::NotSquare {
                rows: self.num_major,
                cols: self.num_minor,
            });
        }
        Ok(self.transposed())
    }

    /// Returns the transpose: entry `(i, j)` of the result is `(j, i)` of `self`.
    ///
    /// Works on 64x64 word blocks; a ragged edge is treated as zero padding.
    pub fn transposed(&self) -> BitTable {
        let mut out = BitTable::zeros(self.num_minor, self.num_major);
        let major_blocks = words_for(self.num_major);
        let minor_blocks = self.row_words;
        let mut block = [0u64; 64];
        for mb in 0..major_blocks {
            for nb in 0..minor_blocks {
                for (r, slot) in block.iter_mut().enumerate() {
                    let m = mb * 64 + r;
                    *slot = if m < self.num_major {
                        self.data[m * self.row_words + nb]
                    } else {
                        0
                    };
                }
                transpose_64x64(&mut block);
                for (r, &word) in block.iter().enumerate() {
                    let m = nb * 64 + r;
                    if m < out.num_major {
                        out.data[m * out.row_words + mb] = word;
                    }
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for BitTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitTable({}x{})", self.num_major, self.num_minor)?;
        for m in 0..self.num_major {
            let s: String = (0..self.num_minor)
                .map(|k| if self.get(m, k) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

/// In-place transpose of a 64x64 bit block (row `r`, bit `c`) <-> (row `c`, bit `r`).
pub fn transpose_64x64(block: &mut [u64; 64]) {
    let mut width = 32;
    let mut mask: u64 = 0x0000_0000_FFFF_FFFF;
    while width != 0 {
        let mut base = 0;
        while base < 64 {
            for r in base..base + width {
                let a = block[r];
                let b = block[r + width];
                let t = ((a >> width) ^ b) & mask;
                block[r] = a ^ (t << width);
                block[r + width] = b ^ t;
            }
            base += 2 * width;
        }
        width >>= 1;
        mask ^= mask << width;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn buf(s: &str) -> BitBuffer {
        BitBuffer::from_bools(&s.chars().map(|c| c == '1').collect::<Vec<_>>())
    }

    #[test]
    fn xor_into_examples() {
        let mut d = buf("0110");
        d.xor_into(&buf("0011")).unwrap();
        assert_eq!(d, buf("0101"));

        let x = buf("1011001");
        let mut d = x.clone();
        d.xor_into(&BitBuffer::zeros(7)).unwrap();
        assert_eq!(d, x);
        d.xor_into(&x).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn xor_into_length_mismatch() {
        let mut d = BitBuffer::zeros(4);
        assert!(matches!(
            d.xor_into(&BitBuffer::zeros(5)),
            Err(Error::LengthMismatch { left: 4, right: 5 })
        ));
    }

    #[test]
    fn popcount_examples() {
        assert_eq!(BitBuffer::zeros(300).popcount(), 0);
        let mut b = BitBuffer::zeros(300);
        b.set(257, true);
        assert_eq!(b.popcount(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = BitBuffer::random(300, &mut rng);
        let mut c = r.clone();
        c.invert();
        assert_eq!(r.popcount() + c.popcount(), 300);
        c.invert();
        assert_eq!(c, r);
    }

    #[test]
    fn padding_stays_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut b = BitBuffer::random(70, &mut rng);
        b.invert();
        assert_eq!(b.words()[1] >> 6, 0);
        let t = BitTable::random(3, 70, &mut rng);
        for m in 0..3 {
            assert_eq!(t.row(m)[1] >> 6, 0);
        }
    }

    #[test]
    fn transpose_small() {
        let mut t = BitTable::zeros(2, 2);
        t.set(0, 1, true);
        let u = t.transpose_square().unwrap();
        assert!(u.get(1, 0));
        assert!(!u.get(0, 1));
        assert!(!u.get(0, 0) && !u.get(1, 1));

        let id = BitTable::identity(100);
        assert_eq!(id.transpose_square().unwrap(), id);
    }

    #[test]
    fn transpose_rejects_non_square() {
        assert!(matches!(
            BitTable::zeros(3, 4).transpose_square(),
            Err(Error::NotSquare { rows: 3, cols: 4 })
        ));
    }

    #[test]
    fn double_transpose_256() {
        let mut rng = ChaCha8Rng::seed_from_u64(256);
        let t = BitTable::random(256, 256, &mut rng);
        let u = t.transpose_square().unwrap();
        for i in 0..256 {
            for j in 0..256 {
                assert_eq!(u.get(i, j), t.get(j, i));
            }
        }
        assert_eq!(u.transpose_square().unwrap(), t);
    }

    #[test]
    fn two_rows_mut_either_order() {
        let mut t = BitTable::zeros(3, 8);
        t.set(2, 1, true);
        let (a, b) = t.two_rows_mut(2, 0);
        b[0] = a[0];
        assert!(t.get(0, 1));
    }

    proptest! {
        #[test]
        fn transpose_rectangular_matches_definition(
            rows in 0usize..150, cols in 0usize..150, seed in any::<u64>()
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = BitTable::random(rows, cols, &mut rng);
            let u = t.transposed();
            prop_assert_eq!(u.num_major(), cols);
            prop_assert_eq!(u.num_minor(), rows);
            for i in 0..cols {
                for j in 0..rows {
                    prop_assert_eq!(u.get(i, j), t.get(j, i));
                }
            }
            prop_assert_eq!(u.transposed(), t);
        }

        #[test]
        fn xor_order_independent(seed in any::<u64>(), len in 1usize..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let srcs: Vec<_> = (0..4).map(|_| BitBuffer::random(len, &mut rng)).collect();
            let mut a = BitBuffer::zeros(len);
            let mut b = BitBuffer::zeros(len);
            for s in &srcs {
                a.xor_into(s).unwrap();
            }
            for s in srcs.iter().rev() {
                b.xor_into(s).unwrap();
            }
            prop_assert_eq!(a, b);
        }
    }
}
