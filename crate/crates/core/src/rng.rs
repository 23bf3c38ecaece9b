//! Seeded, splittable random streams.
//!
//! Every randomized verdict is a function of `(seed, stream)`: the stream id
//! selects an independent ChaCha stream, so work split across indices is
//! reproducible regardless of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::Rational;

/// Derives a stream id from a tag and a list of indices (FNV-1a over the
/// little-endian words).
pub fn stream_id(tag: u64, indices: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ tag;
    for &i in indices {
        for b in i.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Independent generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Rational `a/b` with `|a| <= bound` and `1 <= b <= bound`.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound.max(1));
    Rational::new(num.into(), den.into())
}
