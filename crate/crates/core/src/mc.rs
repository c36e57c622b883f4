//! Seeded Monte Carlo plumbing: per-task ChaCha substreams and mergeable
//! running statistics.
//!
//! Work is split into fixed-size chunks keyed by chunk index, so results do
//! not depend on how many worker threads execute them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const CHUNK: u64 = 1 << 16;

/// Independent generator for task `stream` under `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RunningStats {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Self { count, mean, m2 }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Runs `samples` draws of `draw` split into chunks, each chunk on its own
/// substream, and merges the per-chunk statistics in chunk order.
pub fn estimate<D>(samples: u64, seed: u64, draw: D) -> RunningStats
where
    D: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<RunningStats> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK.min(samples - c * CHUNK);
            let mut rng = substream(seed, c);
            let mut stats = RunningStats::default();
            for _ in 0..n {
                stats.push(draw(&mut rng));
            }
            stats
        })
        .collect();
    parts.iter().fold(RunningStats::default(), |acc, s| acc.merge(s))
}
