//! Deterministic seed derivation. Every randomized operation takes an
//! explicit 64-bit seed; orchestration layers derive per-purpose sub-seeds
//! from a single master seed via labeled streams, so one seed reproduces an
//! entire run.

/// splitmix64 finalizer; good avalanche for seed mixing.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derives a sub-seed from a master seed and a stream label.
///
/// Labels are plain strings like `"qset/cycle/32/k2"`; equal (master, label)
/// pairs always yield equal sub-seeds.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325; // FNV-1a offset basis
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix64(master ^ h)
}
