//! Named, splittable deterministic random streams.
//!
//! Every consumer of randomness inside an environment draws from its own
//! stream, derived from the root seed and a stream name. Adding a new
//! consumer never perturbs the draws of an existing one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Root of a tree of named random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    root: u64,
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        Self { root: seed }
    }

    pub fn seed(&self) -> u64 {
        self.root
    }

    /// A child tree, e.g. one per episode.
    pub fn child(&self, name: &str) -> SeedTree {
        SeedTree {
            root: mix(self.root ^ fnv1a(name.as_bytes())),
        }
    }

    /// A child tree indexed by number.
    pub fn child_index(&self, name: &str, index: u64) -> SeedTree {
        SeedTree {
            root: mix(mix(self.root ^ fnv1a(name.as_bytes())).wrapping_add(index)),
        }
    }

    pub fn stream(&self, name: &str) -> StreamRng {
        StreamRng::seed_from_u64(self.child(name).root)
    }
}

/// Seed of episode `index` in a run seeded with `run_seed`.
pub fn episode_seed(run_seed: u64, index: u64) -> u64 {
    SeedTree::new(run_seed).child_index("episode", index).root
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// splitmix64 finalizer.
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
