//! Seeded, stream-splittable random number generation.
//!
//! Every random quantity in the crate is drawn from a ChaCha stream derived
//! from a user seed, a fixed domain tag, and a stream index. Replication `r`
//! of a study always uses stream `r` of the design domain, so replications
//! are reproducible independently of evaluation order and may run
//! concurrently.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Domain tags keep unrelated consumers of the same user seed independent.
pub(crate) const DOMAIN_DESIGN: u64 = 0;
pub(crate) const DOMAIN_CELLS: u64 = 1;
pub(crate) const DOMAIN_SOBOL: u64 = 2;
pub(crate) const DOMAIN_BOOTSTRAP: u64 = 3;

/// Build the generator for `(seed, domain, stream)`.
pub(crate) fn stream_rng(seed: u64, domain: u64, stream: u64) -> Stream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Generator used when a design is drawn once from a bare seed.
pub fn design_rng(seed: u64) -> Stream {
    stream_rng(seed, DOMAIN_DESIGN, 0)
}

/// Generator for replication `r` of a study with the given base seed.
/// Replication 0 coincides with [`design_rng`].
pub fn replication_rng(seed: u64, replication: u64) -> Stream {
    stream_rng(seed, DOMAIN_DESIGN, replication)
}

/// Uniform draw from the open interval (0, 1).
///
/// The standard sampler returns values in [0, 1); exact zero is rejected so
/// the result can always be pushed through an inverse CDF.
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
