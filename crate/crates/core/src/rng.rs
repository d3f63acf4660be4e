//! Deterministic random streams for parallel Monte Carlo.
//!
//! Every chunk of trials owns its own ChaCha8 stream whose seed is a hash of
//! `(plan seed, SNR point key, chunk index)`. Because the stream depends on
//! nothing else, results are identical for any worker count or schedule.
//!
//! The hash is the SplitMix64 finalizer folded over the key words:
//!
//! ```text
//! h = mix(seed ^ GOLDEN)
//! for w in words: h = mix(h ^ mix(w + GOLDEN))
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream type used by all samplers in the crate.
pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a 64-bit sub-seed from a root seed and a list of key words.
pub fn derive_seed(seed: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(mix(seed ^ GOLDEN), |h, &w| mix(h ^ mix(w.wrapping_add(GOLDEN))))
}

/// Opens the stream for a given root seed and key.
pub fn stream(seed: u64, words: &[u64]) -> Stream {
    Stream::seed_from_u64(derive_seed(seed, words))
}

/// Key word identifying an SNR point. Uses the bit pattern of the value so
/// that splitting a grid never changes a point's stream.
pub fn snr_key(snr_db: f64) -> u64 {
    // -0.0 and 0.0 name the same point
    if snr_db == 0.0 {
        0.0f64.to_bits()
    } else {
        snr_db.to_bits()
    }
}
