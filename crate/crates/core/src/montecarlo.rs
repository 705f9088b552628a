//! Ergodic rates by averaging over independent channel draws.
//!
//! Trial `i` draws its gains from substream `i` of the seed, so any trial can
//! be reproduced in isolation. Trials are grouped in fixed-size chunks whose
//! statistics are merged in chunk order; the result is therefore the same
//! bit pattern for any thread count.

use rayon::prelude::*;

use crate::channel::{sample_draw, RngStream};
use crate::model::{PowerBudget, SystemParams};
use crate::rates::{draw_rates, RatePair};

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicEstimate {
    pub c1: f64,
    pub c2: f64,
    pub c_sum: f64,
    pub se1: f64,
    pub se2: f64,
    pub se_sum: f64,
    pub n_trials: u64,
}

/// Rates of a single trial.
pub fn trial_rates(params: &SystemParams, budget: &PowerBudget, seed: u64, index: u64) -> RatePair {
    let mut stream = RngStream::new(seed, index);
    let draw = sample_draw(params, &mut stream);
    draw_rates(params, budget, &draw)
}

/// Running mean and sum of squared deviations (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * (other.n as f64 / n as f64);
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        Moments { n, mean, m2 }
    }

    fn standard_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkStats {
    r1: Moments,
    r2: Moments,
    sum: Moments,
}

impl ChunkStats {
    fn merge(self, other: ChunkStats) -> ChunkStats {
        ChunkStats {
            r1: self.r1.merge(other.r1),
            r2: self.r2.merge(other.r2),
            sum: self.sum.merge(other.sum),
        }
    }
}

pub fn estimate_ergodic(params: &SystemParams, n_trials: u64, seed: u64) -> ErgodicEstimate {
    assert!(n_trials >= 1, "at least one trial is required");
    let budget = params.budget();
    let n_chunks = n_trials.div_ceil(CHUNK);
    let chunks: Vec<ChunkStats> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(n_trials);
            let mut stats = ChunkStats::default();
            for i in start..end {
                let r = trial_rates(params, &budget, seed, i);
                stats.r1.push(r.r1);
                stats.r2.push(r.r2);
                stats.sum.push(r.sum);
            }
            stats
        })
        .collect();
    let total = chunks
        .into_iter()
        .fold(ChunkStats::default(), ChunkStats::merge);
    let (c1, c2) = (total.r1.mean, total.r2.mean);
    ErgodicEstimate {
        c1,
        c2,
        c_sum: c1 + c2,
        se1: total.r1.standard_error(),
        se2: total.r2.standard_error(),
        se_sum: total.sum.standard_error(),
        n_trials,
    }
}
