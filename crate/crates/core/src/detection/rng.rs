use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Substream identifiers; each consumer draws from its own stream of the master seed.
pub mod stream {
    pub const PAIRS: u64 = 1;
    pub const EFFICIENCY: u64 = 2;
    pub const SPURIOUS_AS: u64 = 3;
    pub const SPURIOUS_S: u64 = 4;
    pub const UNCORRELATED_AS: u64 = 5;
    pub const DELAYS: u64 = 6;
    pub const SPLIT: u64 = 7;
    pub const UNPAIRED: u64 = 8;
}

/// Counter-based generator for substream `id` of `seed`.
pub fn substream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Seed for work item `index` of a run seeded with `master` (SplitMix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
