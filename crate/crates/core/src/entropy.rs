//! Seedable randomness and fast Bernoulli sampling.
//!
//! Small probabilities are sampled by drawing geometric gaps between hits, so
//! the cost scales with the number of hits rather than the number of trials.
//! Intermediate probabilities use a truncated byte comparison (p rounded down
//! to a multiple of 1/256) OR-ed with a sparse refinement pass.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitBuffer;

pub type SimRng = ChaCha8Rng;

/// Below this the geometric path is used on its own.
pub const GEOMETRIC_THRESHOLD: f64 = 0.02;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for batch `stream` under `seed`.
pub fn rng_for_stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A seed drawn from the operating system's entropy source.
pub fn entropy_seed() -> u64 {
    rand::rng().next_u64()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilitySplit {
    pub p: f64,
    pub p_trunc: f64,
    pub p_refine: f64,
    /// `p_trunc * 256`.
    pub threshold: u32,
}

impl ProbabilitySplit {
    pub fn new(p: f64) -> Self {
        let threshold = (256.0 * p).floor().clamp(0.0, 256.0) as u32;
        let p_trunc = threshold as f64 / 256.0;
        let p_refine = if threshold == 256 {
            0.0
        } else {
            ((p - p_trunc) / (1.0 - p_trunc)).max(0.0)
        };
        ProbabilitySplit {
            p,
            p_trunc,
            p_refine,
            threshold,
        }
    }
}

/// Number of failures before the next success of a Bernoulli(p) sequence,
/// given `ln(1 - p)`.
#[inline]
fn geometric_gap<R: RngCore + ?Sized>(rng: &mut R, ln_q: f64) -> f64 {
    // 1 - [0, 1) lies in (0, 1], keeping the log finite.
    let u = 1.0 - rng.random::<f64>();
    (u.ln() / ln_q).floor()
}

/// Calls `hit` for each index in `0..n` that succeeds with probability `p`,
/// in ascending order. Expected work is proportional to `n·p + 1`.
pub fn for_each_hit<R: RngCore + ?Sized>(n: usize, p: f64, rng: &mut R, mut hit: impl FnMut(usize)) {
    if p <= 0.0 || n == 0 {
        return;
    }
    if p >= 1.0 {
        (0..n).for_each(hit);
        return;
    }
    let ln_q = (-p).ln_1p();
    let mut k = 0usize;
    loop {
        let gap = geometric_gap(rng, ln_q);
        if gap >= (n - k) as f64 {
            return;
        }
        k += gap as usize;
        hit(k);
        k += 1;
        if k >= n {
            return;
        }
    }
}

pub fn sample_hits_geometric<R: RngCore + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<usize> {
    let mut out = Vec::new();
    for_each_hit(n, p, rng, |k| out.push(k));
    out
}

/// 64 lanes of `byte < threshold` for uniform random bytes, computed with
/// the bytes stored bit-sliced across eight random words.
#[inline]
fn bytes_below<R: RngCore + ?Sized>(threshold: u32, rng: &mut R) -> u64 {
    if threshold == 0 {
        return 0;
    }
    if threshold >= 256 {
        return !0;
    }
    let mut lt = 0u64;
    let mut eq = !0u64;
    for b in (0..8).rev() {
        let plane = rng.next_u64();
        if (threshold >> b) & 1 == 1 {
            lt |= eq & !plane;
            eq &= plane;
        } else {
            eq &= !plane;
        }
    }
    lt
}

/// Fills the first `len` bits of `words` with Bernoulli(p) bits using the
/// truncated byte comparison plus a sparse refinement. Bits past `len` are
/// cleared.
pub fn fill_bernoulli_hybrid_words<R: RngCore + ?Sized>(words: &mut [u64], len: usize, p: f64, rng: &mut R) {
    let split = ProbabilitySplit::new(p);
    for w in words.iter_mut() {
        *w = bytes_below(split.threshold, rng);
    }
    for_each_hit(len, split.p_refine, rng, |k| words[k / 64] |= 1 << (k % 64));
    clear_padding(words, len);
}

fn clear_padding(words: &mut [u64], len: usize) {
    let full = len / 64;
    if full < words.len() {
        if !len.is_multiple_of(64) {
            words[full] &= (1u64 << (len % 64)) - 1;
            words[full + 1..].fill(0);
        } else {
            words[full..].fill(0);
        }
    }
}

pub fn fill_bernoulli_hybrid<R: RngCore + ?Sized>(dst: &mut BitBuffer, p: f64, rng: &mut R) {
    let len = dst.len();
    fill_bernoulli_hybrid_words(dst.words_mut(), len, p, rng);
}

/// Fills `len` bits with Bernoulli(p), choosing the sampling path by `p`.
pub fn fill_bernoulli_words<R: RngCore + ?Sized>(words: &mut [u64], len: usize, p: f64, rng: &mut R) {
    if p > 0.5 {
        fill_bernoulli_words(words, len, 1.0 - p, rng);
        for w in words.iter_mut() {
            *w = !*w;
        }
        clear_padding(words, len);
    } else if p < GEOMETRIC_THRESHOLD {
        words.fill(0);
        for_each_hit(len, p, rng, |k| words[k / 64] |= 1 << (k % 64));
    } else {
        fill_bernoulli_hybrid_words(words, len, p, rng);
    }
}

pub fn fill_bernoulli<R: RngCore + ?Sized>(dst: &mut BitBuffer, p: f64, rng: &mut R) {
    let len = dst.len();
    fill_bernoulli_words(dst.words_mut(), len, p, rng);
}

/// XORs fair coin flips into every word.
pub fn xor_random<R: RngCore + ?Sized>(words: &mut [u64], rng: &mut R) {
    for w in words {
        *w ^= rng.next_u64();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within_sigmas(count: usize, n: usize, p: f64, sigmas: f64) -> bool {
        let mean = n as f64 * p;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - mean).abs() <= sigmas * sd.max(1e-12)
    }

    #[test]
    fn geometric_edge_cases() {
        let mut rng = rng_from_seed(1);
        assert!(sample_hits_geometric(1000, 0.0, &mut rng).is_empty());
        assert_eq!(sample_hits_geometric(50, 1.0, &mut rng), (0..50).collect::<Vec<_>>());
        assert!(sample_hits_geometric(0, 0.5, &mut rng).is_empty());
    }

    #[test]
    fn geometric_statistics() {
        let mut rng = rng_from_seed(2);
        let n = 10_000_000;
        let hits = sample_hits_geometric(n, 0.001, &mut rng);
        assert!(within_sigmas(hits.len(), n, 0.001, 5.0), "{}", hits.len());
        assert!(hits.windows(2).all(|w| w[0] < w[1]));
        assert!(*hits.last().unwrap() < n);
    }

    #[test]
    fn split_examples() {
        let s = ProbabilitySplit::new(76.0 / 256.0);
        assert_eq!(s.threshold, 76);
        assert_eq!(s.p_refine, 0.0);
        let s = ProbabilitySplit::new(0.3);
        assert_eq!(s.p_trunc, 0.296875);
        assert!((s.p_refine - 0.004444444444444).abs() < 1e-9);
        let s = ProbabilitySplit::new(1.0);
        assert_eq!((s.threshold, s.p_refine), (256, 0.0));
    }

    #[test]
    fn split_composition_law() {
        let mut rng = rng_from_seed(3);
        for _ in 0..10_000 {
            let p: f64 = rng.random();
            let s = ProbabilitySplit::new(p);
            assert!(s.p_trunc <= p);
            assert!(s.p_refine < 1.0 / (256.0 * (1.0 - s.p_trunc)) + 1e-15);
            let composed = 1.0 - (1.0 - s.p_trunc) * (1.0 - s.p_refine);
            assert!((composed - p).abs() <= 1e-12 * p.max(1e-300), "{p}");
        }
    }

    #[test]
    fn hybrid_statistics() {
        let mut rng = rng_from_seed(4);
        let mut buf = BitBuffer::zeros(10_000_000);
        fill_bernoulli_hybrid(&mut buf, 0.3, &mut rng);
        assert!(within_sigmas(buf.popcount(), buf.len(), 0.3, 5.0));
        let mut buf = BitBuffer::zeros(1_000_003);
        fill_bernoulli_hybrid(&mut buf, 76.0 / 256.0, &mut rng);
        assert!(within_sigmas(buf.popcount(), buf.len(), 76.0 / 256.0, 5.0));
    }

    #[test]
    fn dispatch_covers_all_paths() {
        let mut rng = rng_from_seed(5);
        for p in [0.0, 0.005, 0.05, 0.5, 0.7, 0.999, 1.0] {
            let mut buf = BitBuffer::zeros(200_003);
            fill_bernoulli(&mut buf, p, &mut rng);
            assert!(within_sigmas(buf.popcount(), buf.len(), p, 5.0), "p={p}");
            // Padding bits stay clear.
            let last = *buf.words().last().unwrap();
            assert_eq!(last >> (buf.len() % 64), 0);
        }
    }

    #[test]
    fn byte_compare_is_exact() {
        // Every threshold gives frequency threshold/256.
        let mut rng = rng_from_seed(6);
        for t in [1u32, 17, 128, 255] {
            let mut count = 0;
            let words = 20_000;
            for _ in 0..words {
                count += bytes_below(t, &mut rng).count_ones() as usize;
            }
            assert!(within_sigmas(count, words * 64, t as f64 / 256.0, 5.0), "t={t}");
        }
    }

    #[test]
    fn seeded_reproducibility() {
        let a = sample_hits_geometric(100_000, 0.01, &mut rng_from_seed(9));
        let b = sample_hits_geometric(100_000, 0.01, &mut rng_from_seed(9));
        assert_eq!(a, b);
        let mut x = BitBuffer::zeros(5000);
        let mut y = BitBuffer::zeros(5000);
        fill_bernoulli(&mut x, 0.3, &mut rng_for_stream(9, 2));
        fill_bernoulli(&mut y, 0.3, &mut rng_for_stream(9, 2));
        assert_eq!(x.words(), y.words());
        let mut z = BitBuffer::zeros(5000);
        fill_bernoulli(&mut z, 0.3, &mut rng_for_stream(9, 3));
        assert_ne!(x.words(), z.words());
    }
}
