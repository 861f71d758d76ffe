//! Seed derivation and the deterministic RNG used throughout the crate.
//!
//! Every randomized routine takes an explicit 64-bit seed and runs a
//! [`ChaCha12Rng`] stream, so identical inputs reproduce identical outputs on
//! any platform. Independent streams (per trial, per grid point) are derived
//! from a master seed with [`derive_seed`].

pub use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;

/// The SplitMix64 finalizer (a bijective 64-bit mixer).
#[inline]
pub fn mix64(v: u64) -> u64 {
    let mut z = v.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and a key path.
///
/// The mixing rule is fixed so results can be reproduced externally:
/// starting from `h = mix64(master)`, each component is absorbed as
/// `h = mix64(h ^ component)`, where `mix64` is the SplitMix64 finalizer.
/// Only the accumulator side is mixed, so the rule is not symmetric in its
/// arguments and `(master, [a, b])` never collides with `(a, [master, b])`.
///
/// ```
/// use pgmatch::rng::derive_seed;
/// let a = derive_seed(42, &[7, 0]);
/// let b = derive_seed(42, &[7, 1]);
/// assert_ne!(a, b);
/// assert_eq!(a, derive_seed(42, &[7, 0]));
/// ```
pub fn derive_seed(master: u64, components: &[u64]) -> u64 {
    let mut h = mix64(master);
    for &c in components {
        h = mix64(h ^ c);
    }
    h
}

/// Builds the crate-standard RNG from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_seed_is_stable_and_injective_in_practice() {
        let mut seen = std::collections::HashSet::new();
        for master in 0..4u64 {
            for a in 0..8u64 {
                for b in 0..8u64 {
                    assert!(seen.insert(derive_seed(master, &[a, b])));
                }
            }
        }
    }

    #[test]
    fn rng_streams_are_reproducible() {
        use rand::RngCore;
        let mut r1 = rng_from_seed(7);
        let mut r2 = rng_from_seed(7);
        for _ in 0..16 {
            assert_eq!(r1.next_u64(), r2.next_u64());
        }
    }
}
