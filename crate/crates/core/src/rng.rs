//! Deterministic random generation split into named lanes.
//!
//! Every stochastic stage draws from its own lane, so adding draws in one
//! stage never shifts another stage's sequence. A lane is a ChaCha8 stream
//! keyed by the run seed, with the stream id derived from the lane label and
//! an optional index (frame, capture, block).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LaneRng = ChaCha8Rng;

pub const FADING: &str = "fading";
pub const NOISE: &str = "noise";
pub const PHASE_NOISE: &str = "phase-noise";
pub const DATA: &str = "data";

// FNV-1a, 64 bit.
fn lane_id(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Generator for `(seed, lane)`.
pub fn seeded_rng(seed: u64, lane: &str) -> LaneRng {
    seeded_rng_indexed(seed, lane, 0)
}

/// Generator for `(seed, lane, index)`; used for per-frame and per-block
/// lanes so that parallel workers stay reproducible.
pub fn seeded_rng_indexed(seed: u64, lane: &str, index: u64) -> LaneRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(lane_id(label_or_default(lane)) ^ index.rotate_left(32));
    rng
}

fn label_or_default(lane: &str) -> &str {
    if lane.is_empty() {
        "default"
    } else {
        lane
    }
}
