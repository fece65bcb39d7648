use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agents::AgentKind;

/// Identifies one run within an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RunKey {
    pub agent: AgentKind,
    pub horizon: u64,
    pub rep: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Purpose {
    EnvNoise,
    AgentCoins,
    OptStream,
}

impl Purpose {
    fn tag(self) -> &'static [u8] {
        match self {
            Purpose::EnvNoise => b"env-noise",
            Purpose::AgentCoins => b"agent-coins",
            Purpose::OptStream => b"opt-stream",
        }
    }
}

/// SHA-256 of the master seed, the run key and the purpose tag, truncated to
/// 64 bits. All integers are hashed little-endian and every field is
/// length-prefixed, so the result is platform independent.
pub fn derive_seed(master_seed: u64, key: &RunKey, purpose: Purpose) -> u64 {
    let mut h = Sha256::new();
    h.update(b"rgl/derive_seed/v1");
    h.update(master_seed.to_le_bytes());
    for field in [key.agent.name().as_bytes(), purpose.tag()] {
        h.update((field.len() as u64).to_le_bytes());
        h.update(field);
    }
    h.update(key.horizon.to_le_bytes());
    h.update(u64::from(key.rep).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}
