//! Seeded randomness with a uniqueness registry.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::crypto::{Nonce, BLOCK};
use crate::error::HarnessError;
use crate::types::GutiValue;

/// Builds the generator for one `(seed, stream)` pair. Distinct streams
/// under the same seed are independent.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The randomness source of one world. Every nonce and temporary identity
/// drawn here is checked against all earlier ones.
#[derive(Debug, Clone)]
pub struct Entropy {
    rng: ChaCha20Rng,
    seen: HashSet<[u8; BLOCK]>,
}

impl Entropy {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { rng: stream_rng(seed, stream), seen: HashSet::new() }
    }

    fn unique_block(&mut self) -> Result<[u8; BLOCK], HarnessError> {
        let mut bytes = [0u8; BLOCK];
        self.rng.fill(&mut bytes);
        if !self.seen.insert(bytes) {
            return Err(HarnessError::Collision);
        }
        Ok(bytes)
    }

    pub fn nonce(&mut self) -> Result<Nonce, HarnessError> {
        self.unique_block().map(Nonce::from_bytes)
    }

    pub fn guti_value(&mut self) -> Result<GutiValue, HarnessError> {
        self.unique_block().map(GutiValue)
    }

    /// Raw access for key generation.
    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    /// Registers an externally produced value; used by tests to force
    /// a collision.
    pub fn register(&mut self, bytes: [u8; BLOCK]) -> bool {
        self.seen.insert(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_nonces() {
        let mut a = Entropy::new(5, 0);
        let mut b = Entropy::new(5, 0);
        for _ in 0..10 {
            assert_eq!(a.nonce().unwrap(), b.nonce().unwrap());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = Entropy::new(5, 0);
        let mut b = Entropy::new(5, 1);
        assert_ne!(a.nonce().unwrap(), b.nonce().unwrap());
    }

    #[test]
    fn collision_is_reported() {
        let mut probe = Entropy::new(9, 0);
        let first = *probe.nonce().unwrap().as_bytes();
        let mut e = Entropy::new(9, 0);
        assert!(e.register(first));
        assert_eq!(e.nonce(), Err(HarnessError::Collision));
    }
}
