//! Seed discipline.
//!
//! Every random decision in a campaign draws from a substream keyed by
//! `(master seed, iteration, batch slot, purpose)`. Substreams are
//! independent ChaCha streams, so replaying one proposal only needs its key.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

/// What a substream is used for. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Init = 0,
    Thompson = 1,
    Hyper = 2,
    Fallback = 3,
    Random = 4,
    HyperOuter = 5,
    Objective = 6,
}

pub fn substream(master: u64, iteration: u64, slot: u64, purpose: Purpose) -> StreamRng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&iteration.to_le_bytes());
    seed[16..24].copy_from_slice(&slot.to_le_bytes());
    seed[24..32].copy_from_slice(&(purpose as u64).to_le_bytes());
    ChaCha20Rng::from_seed(seed)
}

/// Convenience for tests and one-off draws.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha20Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: u64 = substream(7, 3, 1, Purpose::Thompson).random();
        let b: u64 = substream(7, 3, 1, Purpose::Thompson).random();
        let c: u64 = substream(7, 3, 2, Purpose::Thompson).random();
        let d: u64 = substream(7, 3, 1, Purpose::Init).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
