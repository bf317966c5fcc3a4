//! Counter-based random streams.
//!
//! A stream is addressed by `(seed, label, replication)`; draws inside a
//! replication advance a ChaCha block counter. No generator state is shared
//! between replications, so any partition of the replications across workers
//! reproduces the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named sub-streams derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamLabel {
    /// Draws used to estimate the per-step moments `a_i(s)`.
    Moments,
    /// Draws used to estimate `E‖S_n‖^t`.
    Norms,
    /// Random points for the pointwise inequality sweeps.
    Points,
}

impl StreamLabel {
    fn tag(self) -> u64 {
        match self {
            StreamLabel::Moments => 0x6d6f_6d65_6e74_7300,
            StreamLabel::Norms => 0x6e6f_726d_7300_0000,
            StreamLabel::Points => 0x706f_696e_7473_0000,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for replication `replication` of stream `label` under `seed`.
pub fn stream_rng(seed: u64, label: StreamLabel, replication: u64) -> ChaCha8Rng {
    let mut state = seed ^ label.tag();
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replication);
    rng
}
