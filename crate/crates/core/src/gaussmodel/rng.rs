use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::smallmat::std_normal_quantile;

/// Reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8, a counter-based generator: a given pair always yields
/// the same sequence on every platform, and distinct stream ids are
/// independent. Sub-streams are derived by hashing tags into a new id, so
/// work can be split across threads without sharing generator state.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        SeededRng {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Fresh generator on a stream determined by this stream's id and `tags`.
    /// The parent's position is irrelevant.
    pub fn derive(&self, tags: &[u64]) -> SeededRng {
        let id = tags
            .iter()
            .fold(mix64(self.stream_id), |acc, &t| mix64(acc ^ mix64(t)));
        SeededRng::new(self.seed, id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on the open interval (0, 1), on a 2⁻⁵³ lattice offset by half a step.
    pub fn next_open_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate by inverse-CDF transform; consumes exactly one u64.
    pub fn next_std_normal(&mut self) -> f64 {
        std_normal_quantile(self.next_open_unit()).expect("open unit draw lies in (0, 1)")
    }
}
