//! Deterministic random streams.
//!
//! Every unit of parallel work (a subensemble, a noise realization, a grid
//! point) owns a xoshiro256++ generator whose seed is a pure function of the
//! master seed and a short list of integer labels. Results therefore never
//! depend on how the work is scheduled across threads.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Stream = Xoshiro256PlusPlus;

/// Default master seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_181_115;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a sequence of labels into a child seed.
///
/// Label order matters: `derive_seed(s, &[a, b]) != derive_seed(s, &[b, a])`
/// in general.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(master), |h, &label| splitmix64(h ^ splitmix64(label.wrapping_add(h))))
}

/// Independent stream `index` of the generator seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    Xoshiro256PlusPlus::seed_from_u64(derive_seed(seed, &[index]))
}

/// Label tags keep different kinds of derived streams apart.
pub(crate) mod tag {
    pub const NOISE: u64 = 0x6E6F_6973_65;
    pub const ESTIMATE: u64 = 0x6573_7469_6D;
}
