// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded generators. Each consumer draws from its own ChaCha stream so that
//! equal user seeds never couple unrelated random objects.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Basis = 1,
    Alpha = 2,
    Origin = 3,
    NullFrame = 4,
    Counterexample = 5,
    Samples = 6,
    Theory = 7,
    Pairs = 8,
}

pub fn seeded(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
