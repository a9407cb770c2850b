//! Seeded random streams.
//!
//! Every Monte Carlo loop in the crate derives its generators from one root
//! seed. A replication index and a component tag select a ChaCha stream, so
//! draws for replication `r` never depend on how many other replications ran
//! or on the order in which they were scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Component tags for the disjoint streams used within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Component {
    Noise = 0,
    Inefficiency = 1,
    Covariates = 2,
    Limit = 3,
    LimitPair = 4,
    Proposal = 5,
}

const COMPONENTS: u64 = 8;

/// Generator for replication `index`, component `component`, under `seed`.
pub fn substream(seed: u64, index: u64, component: Component) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_mul(COMPONENTS).wrapping_add(component as u64));
    rng
}

/// Plain generator for callers that do not need substreams.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
