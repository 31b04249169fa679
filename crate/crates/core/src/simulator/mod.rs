//! Monte Carlo sampling of X and model fitting.
//!
//! Sample `i` draws its coloring from `ChaCha8Rng::seed_from_u64(seed)` with
//! the stream set to `i` (rand_chacha), so a report depends only on
//! `(n, k, samples, seed)`. Samples are processed in fixed chunks of
//! [`CHUNK_SAMPLES`] and the floating-point accumulators of the chunks are
//! merged in chunk order, which keeps results bit-identical for any worker count.

mod accumulator;
mod coloring;
mod fit;

pub use accumulator::{MomentAccumulator, MAX_ORDER};
pub use coloring::{edge_index, fast_count, sample_count, Coloring};
pub use fit::{fit_and_compare, FitReport, Model, ModelParams};

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::binomial;
use crate::error::{Error, Result};

pub const CHUNK_SAMPLES: u64 = 4096;
/// Default cap on `samples * C(n,k)`.
pub const DEFAULT_SUBSET_COST_CAP: f64 = 1e12;
pub const RNG_DESCRIPTION: &str =
    "ChaCha8 (rand_chacha 0.9), seed_from_u64(seed), stream = sample index";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
    pub subset_cost_cap: f64,
}

impl SimulationConfig {
    pub fn new(samples: u64, seed: u64) -> SimulationConfig {
        SimulationConfig {
            samples,
            seed,
            workers: 0,
            subset_cost_cap: DEFAULT_SUBSET_COST_CAP,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n: u32,
    pub k: u32,
    pub samples: u64,
    pub seed: u64,
    pub rng: String,
    pub chunk_samples: u64,
    /// Value of X to the number of samples attaining it.
    pub histogram: BTreeMap<u64, u64>,
    pub moments: MomentAccumulator,
    pub elapsed_seconds: f64,
}

impl SimulationReport {
    /// Builds a report from an existing histogram, e.g. data from another source.
    pub fn from_histogram(
        n: u32,
        k: u32,
        seed: u64,
        histogram: BTreeMap<u64, u64>,
    ) -> SimulationReport {
        let mut moments = MomentAccumulator::default();
        for (&x, &c) in &histogram {
            moments.merge(&MomentAccumulator {
                count: c,
                mean: x as f64,
                ..MomentAccumulator::default()
            });
        }
        SimulationReport {
            n,
            k,
            samples: moments.count,
            seed,
            rng: String::new(),
            chunk_samples: 0,
            histogram,
            moments,
            elapsed_seconds: 0.0,
        }
    }

    /// Everything except the wall-clock time.
    pub fn same_results(&self, other: &SimulationReport) -> bool {
        let strip = |r: &SimulationReport| SimulationReport {
            elapsed_seconds: 0.0,
            ..r.clone()
        };
        strip(self) == strip(other)
    }

    pub fn mean(&self) -> f64 {
        self.moments.mean
    }

    /// Empirical probabilities indexed by value, up to the largest observed value.
    pub fn empirical_pmf(&self) -> Vec<f64> {
        let top = self.histogram.keys().next_back().copied().unwrap_or(0);
        let mut v = vec![0.0; top as usize + 1];
        for (&x, &c) in &self.histogram {
            v[x as usize] = c as f64 / self.samples as f64;
        }
        v
    }
}

struct Chunk {
    histogram: BTreeMap<u64, u64>,
    moments: MomentAccumulator,
}

fn run_chunk(n: u32, k: u32, base: &ChaCha8Rng, range: std::ops::Range<u64>) -> Chunk {
    let mut histogram = BTreeMap::new();
    let mut moments = MomentAccumulator::default();
    for i in range {
        let mut rng = base.clone();
        rng.set_stream(i);
        let c = Coloring::random(n, &mut rng);
        let x = fast_count(n, k, &c);
        *histogram.entry(x).or_insert(0) += 1;
        moments.push(x as f64);
    }
    Chunk { histogram, moments }
}

/// Samples X `cfg.samples` times.
pub fn run(n: u32, k: u32, cfg: &SimulationConfig) -> Result<SimulationReport> {
    if k < 2 || k > n {
        return Err(Error::domain(format!(
            "simulation needs 2 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if cfg.samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let subsets: f64 = binomial(n as u64, k as i64)
        .to_string()
        .parse()
        .unwrap_or(f64::INFINITY);
    let cost = subsets * cfg.samples as f64;
    if cost > cfg.subset_cost_cap {
        return Err(Error::ResourceLimit(format!(
            "{} samples x C({n},{k}) = {cost:.3e} subset tests exceeds the cap {:.3e}",
            cfg.samples, cfg.subset_cost_cap
        )));
    }
    let start = Instant::now();
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let chunks: Vec<u64> = (0..cfg.samples.div_ceil(CHUNK_SAMPLES)).collect();
    let work = || -> Vec<Chunk> {
        chunks
            .par_iter()
            .map(|&c| {
                let lo = c * CHUNK_SAMPLES;
                run_chunk(n, k, &base, lo..(lo + CHUNK_SAMPLES).min(cfg.samples))
            })
            .collect()
    };
    let parts = if cfg.workers == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::ResourceLimit(format!("cannot start worker pool: {e}")))?
            .install(work)
    };
    let mut histogram = BTreeMap::new();
    let mut moments = MomentAccumulator::default();
    for part in parts {
        for (x, c) in part.histogram {
            *histogram.entry(x).or_insert(0) += c;
        }
        moments.merge(&part.moments);
    }
    Ok(SimulationReport {
        n,
        k,
        samples: cfg.samples,
        seed: cfg.seed,
        rng: RNG_DESCRIPTION.to_string(),
        chunk_samples: CHUNK_SAMPLES,
        histogram,
        moments,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_across_workers() {
        let cfg = SimulationConfig::new(10_000, 42);
        let a = run(6, 3, &cfg.with_workers(1)).unwrap();
        let b = run(6, 3, &cfg.with_workers(4)).unwrap();
        assert!(a.same_results(&b));
        assert_eq!(a.histogram.values().sum::<u64>(), 10_000);
        assert_eq!(a.moments.count, 10_000);
        let c = run(6, 3, &SimulationConfig::new(10_000, 43)).unwrap();
        assert_ne!(a.histogram, c.histogram);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            run(5, 6, &SimulationConfig::new(1, 0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            run(5, 3, &SimulationConfig::new(0, 0)),
            Err(Error::Domain(_))
        ));
        let mut cfg = SimulationConfig::new(1000, 0);
        cfg.subset_cost_cap = 100.0;
        assert!(matches!(run(10, 3, &cfg), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn histogram_report_moments() {
        let h: BTreeMap<u64, u64> = [(0, 2), (1, 1), (4, 1)].into_iter().collect();
        let r = SimulationReport::from_histogram(5, 3, 0, h);
        assert_eq!(r.samples, 4);
        assert!((r.mean() - 1.25).abs() < 1e-15);
        assert!((r.moments.variance() - 2.6875).abs() < 1e-12);
    }
}
