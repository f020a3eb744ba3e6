//! Seed derivation. Every random draw in a session is keyed by a seed
//! derived from the session seed and a tag path, so results never depend
//! on call order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix(seed), |acc, &t| splitmix(acc ^ splitmix(t)))
}

pub fn rng(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, tags))
}

// tag namespaces
pub const EMBEDDING: u64 = 1;
pub const TRAIN: u64 = 2;
pub const CV: u64 = 3;
pub const SELECT: u64 = 4;
pub const SURROGATE: u64 = 5;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_change_the_seed() {
        assert_ne!(derive(1, &[TRAIN, 0]), derive(1, &[TRAIN, 1]));
        assert_ne!(derive(1, &[TRAIN]), derive(2, &[TRAIN]));
        assert_eq!(derive(9, &[CV, 3]), derive(9, &[CV, 3]));
    }
}
