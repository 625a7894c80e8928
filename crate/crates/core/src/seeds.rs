//! Splittable seeding: a master seed fans out into independent child seeds.
//!
//! Every randomization axis (object count, placement, lights, cameras, ...)
//! draws from its own RNG seeded by `child_seed(master, STREAM_*)`. Adding a
//! new axis therefore never perturbs the samples of existing ones, and image
//! `i` of a dataset depends only on `child_seed(master, i)` — which is what
//! makes a 10-image run a byte-level prefix of a 50-image run.

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Full-period mixing of a
/// 64-bit state; consecutive inputs map to statistically independent outputs.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derive the child seed for `stream` under `master`.
///
/// Streams are arbitrary 64-bit labels: dataset image indices or the
/// `STREAM_*` constants below. Children of distinct streams collide with
/// probability ~2^-64.
pub fn child_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

/// Scene-internal stream labels, one per randomization axis.
pub const STREAM_OBJECT_COUNT: u64 = 1;
pub const STREAM_PATTERN: u64 = 2;
pub const STREAM_MODELS: u64 = 3;
pub const STREAM_SCALES: u64 = 4;
pub const STREAM_ALBEDO: u64 = 5;
pub const STREAM_YAW: u64 = 6;
pub const STREAM_PLACEMENT: u64 = 7;
pub const STREAM_LIGHTS: u64 = 8;
pub const STREAM_CAMERAS: u64 = 9;
pub const STREAM_FRIDGE: u64 = 10;
