//! Named, splittable random streams. Every stream is a ChaCha8 generator seeded
//! from the root seed and a tag path, so results do not depend on how work is
//! partitioned across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_NOISE: u64 = 1;
pub const STREAM_FLIPS: u64 = 2;
pub const STREAM_SETUP: u64 = 3;
pub const STREAM_ORACLE: u64 = 4;

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The generator for `(root, tags…)`.
pub fn substream(root: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = root;
    let mut acc = splitmix(&mut state);
    for &t in tags {
        state ^= t.wrapping_mul(0xd6e8_feb8_6659_fd93);
        acc ^= splitmix(&mut state);
    }
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix(&mut state).wrapping_add(acc).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Data-noise and flip streams of one Monte Carlo trial. Grid points sharing a
/// seed see the same draws, which couples sweeps along a rate axis.
pub fn trial_streams(root: u64, trial: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    (substream(root, &[STREAM_NOISE, trial]), substream(root, &[STREAM_FLIPS, trial]))
}

/// Stream for one-off setup draws of a trial (e.g. fabrication fault sets).
pub fn setup_stream(root: u64, trial: u64) -> ChaCha8Rng {
    substream(root, &[STREAM_SETUP, trial])
}
