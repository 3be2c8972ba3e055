//! Monte Carlo estimate of the hit probabilities `p_n`: start at 0, add
//! i.i.d. steps drawn from `q`, and record every level visited up to
//! `n_max`.
//!
//! Trial `t` draws from its own ChaCha8 stream `(seed, t)`, and trials are
//! merged by integer addition, so results do not depend on the thread
//! schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::dist::IncrementDistribution;
use crate::renewal::RenewalSequence;
use crate::scalar::Scalar;

/// Default CI multiplier.
pub const DEFAULT_Z: f64 = 4.0;

/// Below this many trials the normal approximation is flagged as unreliable.
pub const MIN_TRIALS: u64 = 100;

/// Tails below `2⁻⁵³` are dropped when sampling by sequential search.
pub const SAMPLING_TAIL_CUTOFF: f64 = 1.0 / 9_007_199_254_740_992.0;

const TRIALS_PER_BLOCK: u64 = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("estimate and renewal sequence come from different distributions")]
    MismatchedDistributions,
    #[error("renewal sequence stops at {have}, estimate needs levels through {need}")]
    ShortSequence { have: usize, need: usize },
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub dist: IncrementDistribution,
    pub n_max: usize,
    pub trials: u64,
    pub seed: u64,
    pub z: f64,
}

impl SimConfig {
    pub fn new(dist: IncrementDistribution, n_max: usize, trials: u64, seed: u64) -> Self {
        Self {
            dist,
            n_max,
            trials,
            seed,
            z: DEFAULT_Z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitEstimate {
    #[serde(skip)]
    dist: IncrementDistribution,
    pub n_max: usize,
    pub trials: u64,
    pub seed: u64,
    pub z: f64,
    pub hits: Vec<u64>,
    /// Upper bound on the probability mass dropped by the sampler's tail
    /// cutoff within reach of `n_max`.
    pub sampling_bias: f64,
}

impl HitEstimate {
    pub fn dist(&self) -> &IncrementDistribution {
        &self.dist
    }

    pub fn estimate(&self, n: usize) -> f64 {
        self.hits[n] as f64 / self.trials as f64
    }

    pub fn estimates(&self) -> Vec<f64> {
        (0..=self.n_max).map(|n| self.estimate(n)).collect()
    }

    /// `sqrt(p̂(1-p̂)/trials)`.
    pub fn std_error(&self, n: usize) -> f64 {
        let p = self.estimate(n);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// `z·σ̂_n` at the configured multiplier.
    pub fn half_width(&self, n: usize) -> f64 {
        self.z * self.std_error(n)
    }
}

/// Draws one step, capped at `cap` (steps beyond the cap all end the walk
/// the same way).
enum Sampler {
    /// `Q_n` for `n = 0..N`; zero from `N` on.
    Table(Vec<f64>),
    Geometric(f64),
    Search { dist: IncrementDistribution, cutoff: usize },
}

impl Sampler {
    fn new(d: &IncrementDistribution) -> Self {
        if let Some(bound) = d.support_bound() {
            return Sampler::Table((0..bound).map(|n| d.tail_f64(n)).collect());
        }
        if let Some(a) = d.geometric_ratio() {
            return Sampler::Geometric(a);
        }
        let cutoff = d.truncation_budget(SAMPLING_TAIL_CUTOFF);
        Sampler::Search {
            dist: d.clone(),
            cutoff,
        }
    }

    /// Inverse CDF: the step is `min{n : Q_n < u}` for `u ∈ (0, 1]`.
    fn step(&self, u: f64, cap: usize) -> usize {
        match self {
            Sampler::Table(tails) => tails.partition_point(|&t| t >= u).min(cap),
            Sampler::Geometric(a) => {
                if *a == 0.0 {
                    return 1;
                }
                let t = u.ln() / a.ln();
                if t >= cap as f64 {
                    cap
                } else {
                    (t.floor() as usize + 1).min(cap)
                }
            }
            Sampler::Search { dist, cutoff } => {
                let limit = cap.min(*cutoff);
                let mut n = 1;
                while n < limit && dist.tail_f64(n) >= u {
                    n += 1;
                }
                n
            }
        }
    }

    fn bias(&self, d: &IncrementDistribution, n_max: usize) -> f64 {
        match self {
            Sampler::Search { cutoff, .. } if *cutoff <= n_max => d.tail_bound(*cutoff),
            _ => 0.0,
        }
    }
}

fn run_block(sampler: &Sampler, base: &ChaCha8Rng, n_max: usize, trials: std::ops::Range<u64>) -> Vec<u64> {
    let mut hits = vec![0u64; n_max + 1];
    for t in trials {
        let mut rng = base.clone();
        rng.set_stream(t);
        hits[0] += 1;
        let mut x = 0usize;
        loop {
            // u ∈ (0, 1]
            let u = 1.0 - rng.random::<f64>();
            x += sampler.step(u, n_max - x + 1);
            if x > n_max {
                break;
            }
            hits[x] += 1;
        }
    }
    hits
}

/// Runs `cfg.trials` independent walks.
pub fn simulate(cfg: &SimConfig) -> Result<HitEstimate, SimError> {
    if cfg.trials == 0 {
        return Err(SimError::NoTrials);
    }
    let sampler = Sampler::new(&cfg.dist);
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let blocks = cfg.trials.div_ceil(TRIALS_PER_BLOCK);
    let hits = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * TRIALS_PER_BLOCK;
            let end = (start + TRIALS_PER_BLOCK).min(cfg.trials);
            run_block(&sampler, &base, cfg.n_max, start..end)
        })
        .reduce(
            || vec![0u64; cfg.n_max + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(HitEstimate {
        dist: cfg.dist.clone(),
        n_max: cfg.n_max,
        trials: cfg.trials,
        seed: cfg.seed,
        z: cfg.z,
        hits,
        sampling_bias: sampler.bias(&cfg.dist, cfg.n_max),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCheck {
    pub n: usize,
    pub hits: u64,
    pub estimate: f64,
    pub exact: f64,
    pub std_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub z: f64,
    pub levels: Vec<LevelCheck>,
    pub passed: usize,
    pub failed: usize,
    /// Expected number of chance failures, `levels · P(|Z| > z)`.
    pub expected_false_failures: f64,
    pub insufficient_trials: bool,
}

impl ComparisonReport {
    pub fn pass_fraction(&self) -> f64 {
        self.passed as f64 / self.levels.len() as f64
    }
}

/// Per-level check `|p̂_n - p_n| ≤ z·σ̂_n`. A degenerate `σ̂_n = 0` passes
/// only on exact agreement.
pub fn compare_with_recurrence<S: Scalar>(
    est: &HitEstimate,
    r: &RenewalSequence<S>,
    z: f64,
) -> Result<ComparisonReport, SimError> {
    if est.dist != *r.dist() {
        return Err(SimError::MismatchedDistributions);
    }
    if r.last_index() < est.n_max {
        return Err(SimError::ShortSequence {
            have: r.last_index(),
            need: est.n_max,
        });
    }
    let levels: Vec<LevelCheck> = (0..=est.n_max)
        .map(|n| {
            let estimate = est.estimate(n);
            let exact = r.get(n).expect("checked length").to_f64();
            let std_error = est.std_error(n);
            LevelCheck {
                n,
                hits: est.hits[n],
                estimate,
                exact,
                std_error,
                passed: (estimate - exact).abs() <= z * std_error + est.sampling_bias,
            }
        })
        .collect();
    let passed = levels.iter().filter(|l| l.passed).count();
    Ok(ComparisonReport {
        z,
        failed: levels.len() - passed,
        passed,
        expected_false_failures: levels.len() as f64 * erfc(z / std::f64::consts::SQRT_2),
        insufficient_trials: est.trials < MIN_TRIALS,
        levels,
    })
}
