// Copyright 2026 The qsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Reproducible random streams and the inverse-CDF sampler.
//!
//! Every sampling shot draws from its own ChaCha8 stream. The 256-bit key is
//! derived from `(global seed, module tag)` and the ChaCha stream id is the
//! shot index, so shot `k` of an experiment sees the same bits no matter how
//! shots are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator type handed to every sampling routine.
pub type ShotRng = ChaCha8Rng;

/// Outcomes whose probability is below this floor are never sampled.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// Keyed family of per-shot streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(seed: u64, tag: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update((tag.len() as u64).to_le_bytes());
        hasher.update(tag.as_bytes());
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        StreamKey { key }
    }

    /// Independent stream for one shot.
    pub fn shot(&self, shot: u64) -> ShotRng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(shot);
        rng
    }

    /// Sub-family keyed by an extra label, e.g. one per parameter point.
    pub fn child(&self, label: u64) -> StreamKey {
        let mut hasher = Sha256::new();
        hasher.update(self.key);
        hasher.update(label.to_le_bytes());
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        StreamKey { key }
    }
}

/// Shorthand for `StreamKey::new(seed, tag).shot(shot)`.
pub fn shot_rng(seed: u64, tag: &str, shot: u64) -> ShotRng {
    StreamKey::new(seed, tag).shot(shot)
}

/// Cumulative distribution built with compensated summation.
///
/// Probabilities below [`PROBABILITY_FLOOR`] are zeroed. Sampling scales the
/// uniform draw by the accumulated total, so the last admissible bucket
/// absorbs any rounding residual.
#[derive(Debug, Clone)]
pub struct Cdf {
    cumulative: Vec<f64>,
    total: f64,
    last_admissible: Option<usize>,
}

impl Cdf {
    pub fn new(probs: &[f64]) -> Self {
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut last_admissible = None;
        for (i, &p) in probs.iter().enumerate() {
            let p = if p >= PROBABILITY_FLOOR { p } else { 0.0 };
            if p > 0.0 {
                last_admissible = Some(i);
            }
            // Kahan
            let y = p - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            cumulative.push(sum);
        }
        Cdf {
            cumulative,
            total: sum,
            last_admissible,
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Index for a uniform draw `u` in `[0, 1)`; `None` if every bucket is empty.
    pub fn index_for(&self, u: f64) -> Option<usize> {
        let last = self.last_admissible?;
        let target = u * self.total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        Some(idx.min(last))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let u: f64 = rng.random();
        self.index_for(u)
    }
}
