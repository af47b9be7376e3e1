//! Seeded random streams.
//!
//! Every stochastic step in the crate draws from `Xoshiro256StarStar`
//! seeded through splitmix64, so a `u64` seed fully determines the output.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

pub type StegRng = Xoshiro256StarStar;

pub fn seeded(seed: u64) -> StegRng {
    // `seed_from_u64` expands the seed with splitmix64.
    StegRng::seed_from_u64(seed)
}

/// Splitmix64 finalizer, used to derive independent per-item seeds.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th item of a batch driven by `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix(seed ^ mix(index.wrapping_add(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = seeded(7).random_iter().take(8).collect();
        let b: Vec<u64> = seeded(7).random_iter().take(8).collect();
        assert_eq!(a, b);
        let c: Vec<u64> = seeded(8).random_iter().take(8).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..16).map(|i| derive_seed(42, i)).collect();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                assert_ne!(s[i], s[j]);
            }
        }
    }
}
