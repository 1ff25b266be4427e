//! Random generators and checkers for the property suites.

pub mod maps;
pub mod monad;
pub mod programs;
pub mod solver_scripts;

pub use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

/// A deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
