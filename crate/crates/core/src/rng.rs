//! Counter-addressed random streams.
//!
//! Every draw in the harness comes from a stream addressed by
//! `(master_seed, index, purpose)`. The master seed keys a ChaCha8 generator
//! and the `(index, purpose)` pair selects one of its 2^64 independent
//! streams, so replication `r` sees the same numbers no matter which worker
//! thread runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Design,
    Errors,
    Bootstrap,
    Scalar,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Design => 1,
            Purpose::Errors => 2,
            Purpose::Bootstrap => 3,
            Purpose::Scalar => 4,
        }
    }
}

const PURPOSE_BITS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub index: u64,
    pub purpose: Purpose,
}

impl RngStream {
    pub fn new(master_seed: u64, index: u64, purpose: Purpose) -> Self {
        Self {
            master_seed,
            index,
            purpose,
        }
    }

    /// Stream for replication `rep` with the given purpose.
    pub fn replication(master_seed: u64, rep: usize, purpose: Purpose) -> Self {
        Self::new(master_seed, rep as u64, purpose)
    }

    fn stream_id(&self) -> u64 {
        // index occupies the high 56 bits; wraps only beyond 2^56 replications
        (self.index << PURPOSE_BITS) | self.purpose.tag()
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id());
        rng
    }
}
