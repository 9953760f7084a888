//! Synthetic chain-of-thought environment.
//!
//! The policy picks a chain length from a categorical distribution and a
//! shared per-step quality `q = sigmoid(quality_param)`. A noisy oracle then
//! scores each step, with later steps getting harder. All randomness flows
//! through explicit seeds.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prm::{sigmoid, softmax};
use crate::reward_math::StepScore;

pub const DEFAULT_T_MAX: usize = 10;
pub const DEFAULT_NOISE_SCALE: f64 = 0.05;
pub const DEFAULT_DIFFICULTY: f64 = 0.1;

/// Number of entries in each step feature vector: `[q, (j-1)/T_max]`.
pub const STEP_FEATURE_DIM: usize = 2;

/// Categorical distribution over chain lengths `1..=T_max` plus a shared quality logit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    length_logits: Vec<f64>,
    quality_param: f64,
}

impl PolicyParams {
    pub fn new(length_logits: Vec<f64>, quality_param: f64) -> Result<Self> {
        if length_logits.is_empty() {
            return Err(Error::invalid("length_logits", "T_max must be at least 1"));
        }
        if length_logits.iter().any(|l| !l.is_finite()) || !quality_param.is_finite() {
            return Err(Error::NonFinite("policy parameters".into()));
        }
        Ok(Self {
            length_logits,
            quality_param,
        })
    }

    /// Uniform over lengths with the given quality logit.
    pub fn uniform(t_max: usize, quality_param: f64) -> Result<Self> {
        Self::new(vec![0.0; t_max], quality_param)
    }

    pub fn t_max(&self) -> usize {
        self.length_logits.len()
    }

    pub fn length_logits(&self) -> &[f64] {
        &self.length_logits
    }

    pub fn quality_param(&self) -> f64 {
        self.quality_param
    }

    /// `q` in `(0, 1)`.
    pub fn quality(&self) -> f64 {
        sigmoid(self.quality_param)
    }

    /// Probability of each length; index `i` holds `P(t = i + 1)`.
    pub fn length_probs(&self) -> Vec<f64> {
        softmax(&self.length_logits)
    }

    /// `log P(t)`, for `t` in `1..=T_max`.
    pub fn log_prob(&self, t: usize) -> f64 {
        let max = self.length_logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + self.length_logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
        self.length_logits[t - 1] - lse
    }

    pub fn mean_length(&self) -> f64 {
        self.length_probs().iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum()
    }

    /// Applies an additive update to every parameter.
    pub fn step(&mut self, length_delta: &[f64], quality_delta: f64) {
        for (l, d) in self.length_logits.iter_mut().zip(length_delta) {
            *l += d;
        }
        self.quality_param += quality_delta;
    }

    pub(crate) fn length_logits_mut(&mut self) -> &mut [f64] {
        &mut self.length_logits
    }

    pub(crate) fn set_quality_param(&mut self, v: f64) {
        self.quality_param = v;
    }
}

/// One generated chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSample {
    pub t: usize,
    pub t_max: usize,
    /// Per step `[q, (j-1)/T_max]`.
    pub step_features: Vec<Vec<f64>>,
    pub log_prob: f64,
}

impl ChainSample {
    pub fn quality(&self) -> f64 {
        self.step_features.first().map_or(0.0, |f| f[0])
    }
}

fn step_features(q: f64, t: usize, t_max: usize) -> Vec<Vec<f64>> {
    (0..t).map(|j| vec![q, j as f64 / t_max as f64]).collect()
}

/// Draws a length from the policy and builds the chain.
pub fn sample_chain(policy: &PolicyParams, seed: u64) -> ChainSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = policy.length_probs();
    let t = WeightedIndex::new(&probs)
        .expect("softmax weights are positive and finite")
        .sample(&mut rng)
        + 1;
    chain_of_length(policy, t)
}

/// A chain of fixed length under the policy's quality.
pub fn chain_of_length(policy: &PolicyParams, t: usize) -> ChainSample {
    assert!((1..=policy.t_max()).contains(&t), "chain length {t} outside 1..={}", policy.t_max());
    ChainSample {
        t,
        t_max: policy.t_max(),
        step_features: step_features(policy.quality(), t, policy.t_max()),
        log_prob: policy.log_prob(t),
    }
}

/// Settings of the step-scoring oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub noise_scale: f64,
    pub difficulty_per_step: f64,
    pub seed: u64,
}

impl OracleConfig {
    pub fn noiseless(difficulty_per_step: f64) -> Self {
        Self {
            noise_scale: 0.0,
            difficulty_per_step,
            seed: 0,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return Err(Error::invalid("noise_scale", format!("must be >= 0, got {}", self.noise_scale)));
        }
        if !(0.0..=1.0).contains(&self.difficulty_per_step) {
            return Err(Error::invalid(
                "difficulty_per_step",
                format!("must lie in [0, 1], got {}", self.difficulty_per_step),
            ));
        }
        Ok(())
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            noise_scale: DEFAULT_NOISE_SCALE,
            difficulty_per_step: DEFAULT_DIFFICULTY,
            seed: 0,
        }
    }
}

/// Unclamped step scores `q - difficulty*(j-1)/T_max + noise`, noise uniform
/// in `[-noise_scale, noise_scale]`.
pub fn oracle_raw_scores(chain: &ChainSample, oracle: &OracleConfig) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(oracle.seed);
    let q = chain.quality();
    (0..chain.t)
        .map(|j| {
            let noise = if oracle.noise_scale > 0.0 {
                rng.random_range(-oracle.noise_scale..=oracle.noise_scale)
            } else {
                0.0
            };
            q - oracle.difficulty_per_step * j as f64 / chain.t_max as f64 + noise
        })
        .collect()
}

/// Step scores clamped into `[0, 1]`.
pub fn oracle_step_scores(chain: &ChainSample, oracle: &OracleConfig) -> Vec<StepScore> {
    oracle_raw_scores(chain, oracle)
        .into_iter()
        .map(StepScore::saturating)
        .collect()
}

/// Mixes a base seed with a stream tag and an index (splitmix64 finalizer).
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
