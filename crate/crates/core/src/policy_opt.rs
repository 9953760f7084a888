//! KL-regularized policy optimization on the synthetic chain task.
//!
//! The objective is `E[shaping(t) * F(scores)] - beta * KL(pi || pi_ref)`
//! where `F` is the product or geometric-mean accumulation of the step
//! scores and the KL term is taken exactly over the length distribution.
//!
//! Gradients for the length logits use the score-function (REINFORCE)
//! estimator with a running-mean baseline. The quality logit enters the
//! step scores deterministically, so its gradient is the pathwise
//! derivative of the reward through the oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::chain_env::{
    chain_of_length, derive_seed, oracle_raw_scores, sample_chain, ChainSample, OracleConfig, PolicyParams,
};
use crate::error::{Error, Result};
use crate::reward_math::{accumulate_geomean, accumulate_product, weibull_shape, StepScore, WeibullShaping};

pub const DEFAULT_BETA: f64 = 0.1;
pub const BASELINE_MOMENTUM: f64 = 0.9;
pub const DEFAULT_CLIP_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Accumulation {
    Product,
    Geomean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shaping {
    None,
    Weibull(WeibullShaping),
}

impl Shaping {
    pub fn factor(&self, t: usize) -> f64 {
        match self {
            Shaping::None => 1.0,
            Shaping::Weibull(p) => weibull_shape(p, t as u32),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub accumulation: Accumulation,
    pub shaping: Shaping,
    pub beta: f64,
}

impl Objective {
    /// Product accumulation, no shaping.
    pub fn baseline(beta: f64) -> Self {
        Self {
            accumulation: Accumulation::Product,
            shaping: Shaping::None,
            beta,
        }
    }

    /// Geometric-mean accumulation with Weibull shaping.
    pub fn weibull_shaped(params: WeibullShaping, beta: f64) -> Self {
        Self {
            accumulation: Accumulation::Geomean,
            shaping: Shaping::Weibull(params),
            beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::invalid("beta", format!("must be >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

/// Shaped, accumulated reward of one chain.
pub fn chain_reward(objective: &Objective, scores: &[StepScore]) -> Result<f64> {
    let accumulated = match objective.accumulation {
        Accumulation::Product => accumulate_product(scores)?,
        Accumulation::Geomean => accumulate_geomean(scores)?,
    };
    Ok(objective.shaping.factor(scores.len()) * accumulated)
}

/// Partial derivatives of [`chain_reward`] with respect to each step score.
/// Where a geometric mean is not differentiable (a zero score) the
/// derivative is taken as 0.
pub fn chain_reward_score_gradient(objective: &Objective, scores: &[StepScore]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyChain);
    }
    let shaping = objective.shaping.factor(scores.len());
    let t = scores.len();
    let grad: Vec<f64> = match objective.accumulation {
        Accumulation::Product => (0..t)
            .map(|j| {
                scores
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, s)| s.value())
                    .product::<f64>()
            })
            .collect(),
        Accumulation::Geomean => {
            let g = accumulate_geomean(scores)?;
            scores
                .iter()
                .map(|s| if s.value() > 0.0 { g / (t as f64 * s.value()) } else { 0.0 })
                .collect()
        }
    };
    Ok(grad.into_iter().map(|g| g * shaping).collect())
}

/// Reward of a chain and its derivative with respect to the quality logit.
fn reward_and_quality_gradient(objective: &Objective, chain: &ChainSample, oracle: &OracleConfig) -> Result<(f64, f64)> {
    let raw = oracle_raw_scores(chain, oracle);
    let scores: Vec<StepScore> = raw.iter().map(|&r| StepScore::saturating(r)).collect();
    let reward = chain_reward(objective, &scores)?;
    let ds = chain_reward_score_gradient(objective, &scores)?;
    let q = chain.quality();
    // each unclamped score moves one-for-one with q
    let dr_dq: f64 = raw
        .iter()
        .zip(&ds)
        .filter(|(r, _)| **r > 0.0 && **r < 1.0)
        .map(|(_, d)| d)
        .sum();
    Ok((reward, dr_dq * q * (1.0 - q)))
}

fn check_same_support(policy: &PolicyParams, reference: &PolicyParams) -> Result<()> {
    if policy.t_max() != reference.t_max() {
        return Err(Error::DimensionMismatch {
            expected: reference.t_max(),
            actual: policy.t_max(),
        });
    }
    Ok(())
}

/// Exact `KL(pi || pi_ref)` between the two length distributions.
pub fn kl_length(policy: &PolicyParams, reference: &PolicyParams) -> Result<f64> {
    check_same_support(policy, reference)?;
    let kl: f64 = (1..=policy.t_max())
        .map(|t| {
            let lp = policy.log_prob(t);
            lp.exp() * (lp - reference.log_prob(t))
        })
        .sum();
    Ok(kl.max(0.0))
}

/// Gradient of [`kl_length`] with respect to the policy's length logits:
/// `pi_i * (ln(pi_i / ref_i) - KL)`.
pub fn kl_length_gradient(policy: &PolicyParams, reference: &PolicyParams) -> Result<Vec<f64>> {
    check_same_support(policy, reference)?;
    let log_ratio: Vec<f64> = (1..=policy.t_max())
        .map(|t| policy.log_prob(t) - reference.log_prob(t))
        .collect();
    let probs = policy.length_probs();
    let kl: f64 = probs.iter().zip(&log_ratio).map(|(p, r)| p * r).sum();
    Ok(probs.iter().zip(&log_ratio).map(|(p, r)| p * (r - kl)).collect())
}

/// Policy being trained together with its frozen reference copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptState {
    pub policy: PolicyParams,
    reference: PolicyParams,
    pub iteration: usize,
    pub baseline: f64,
}

impl OptState {
    pub fn new(initial: PolicyParams) -> Self {
        Self {
            reference: initial.clone(),
            policy: initial,
            iteration: 0,
            baseline: 0.0,
        }
    }

    pub fn reference(&self) -> &PolicyParams {
        &self.reference
    }
}

/// Gradient with respect to every policy parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGradient {
    pub length_logits: Vec<f64>,
    pub quality_param: f64,
}

/// Oracle stream for rollout `index` of a batch drawn with `seed`.
fn rollout_oracle(oracle: &OracleConfig, seed: u64, index: u64) -> OracleConfig {
    oracle.with_seed(derive_seed(oracle.seed, seed.wrapping_add(1), index))
}

/// One sampled chain with its reward.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub t: usize,
    pub reward: f64,
    /// d reward / d quality_param
    pub quality_gradient: f64,
}

/// Samples `n` chains from the policy and scores them. Runs in parallel;
/// results are in rollout order and independent of thread count.
pub fn rollouts(
    objective: &Objective,
    policy: &PolicyParams,
    oracle: &OracleConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<Rollout>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let chain = sample_chain(policy, derive_seed(seed, 0, i));
            let (reward, quality_gradient) =
                reward_and_quality_gradient(objective, &chain, &rollout_oracle(oracle, seed, i))?;
            Ok(Rollout {
                t: chain.t,
                reward,
                quality_gradient,
            })
        })
        .collect()
}

/// Monte-Carlo mean reward over `n_rollouts` chains minus the exact KL penalty.
pub fn objective_estimate(
    objective: &Objective,
    state: &OptState,
    oracle: &OracleConfig,
    n_rollouts: usize,
    seed: u64,
) -> Result<f64> {
    if n_rollouts == 0 {
        return Err(Error::invalid("n_rollouts", "must be at least 1"));
    }
    let batch = rollouts(objective, &state.policy, oracle, n_rollouts, seed)?;
    let mean = batch.iter().map(|r| r.reward).sum::<f64>() / n_rollouts as f64;
    Ok(mean - objective.beta * kl_length(&state.policy, &state.reference)?)
}

/// Expected reward of a chain of each length `1..=T_max` under a noiseless oracle.
pub fn exact_length_rewards(objective: &Objective, policy: &PolicyParams, difficulty: f64) -> Result<Vec<(f64, f64)>> {
    let oracle = OracleConfig::noiseless(difficulty);
    (1..=policy.t_max())
        .map(|t| reward_and_quality_gradient(objective, &chain_of_length(policy, t), &oracle))
        .collect()
}

/// Objective by enumeration over all lengths with a noiseless oracle.
pub fn exact_objective(
    objective: &Objective,
    policy: &PolicyParams,
    reference: &PolicyParams,
    difficulty: f64,
) -> Result<f64> {
    let rewards = exact_length_rewards(objective, policy, difficulty)?;
    let expected: f64 = policy.length_probs().iter().zip(&rewards).map(|(p, (r, _))| p * r).sum();
    Ok(expected - objective.beta * kl_length(policy, reference)?)
}

/// Score-function gradient of [`exact_objective`], evaluated by enumeration:
/// `sum_t pi_t R_t (e_t - pi) - beta * grad KL` for the length logits and
/// `sum_t pi_t dR_t/dq'` for the quality logit.
pub fn exact_gradient(
    objective: &Objective,
    policy: &PolicyParams,
    reference: &PolicyParams,
    difficulty: f64,
) -> Result<PolicyGradient> {
    let rewards = exact_length_rewards(objective, policy, difficulty)?;
    let probs = policy.length_probs();
    let kl_grad = kl_length_gradient(policy, reference)?;
    let mut length = vec![0.0; probs.len()];
    for (t, (pt, (r, _))) in probs.iter().zip(&rewards).enumerate() {
        for (i, (g, pi)) in length.iter_mut().zip(&probs).enumerate() {
            let indicator = if i == t { 1.0 } else { 0.0 };
            *g += pt * r * (indicator - pi);
        }
    }
    for (g, k) in length.iter_mut().zip(&kl_grad) {
        *g -= objective.beta * k;
    }
    let quality = probs.iter().zip(&rewards).map(|(p, (_, dq))| p * dq).sum();
    Ok(PolicyGradient {
        length_logits: length,
        quality_param: quality,
    })
}

/// How a batch of rollouts is turned into a parameter update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    Reinforce,
    /// Clipped probability-ratio surrogate over whole-chain advantages,
    /// reusing one batch for `epochs` updates.
    ClippedSurrogate { clip_epsilon: f64, epochs: usize },
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::Reinforce
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSettings {
    pub n_rollouts: usize,
    pub learning_rate: f64,
    pub estimator: Estimator,
}

impl StepSettings {
    pub fn reinforce(n_rollouts: usize, learning_rate: f64) -> Self {
        Self {
            n_rollouts,
            learning_rate,
            estimator: Estimator::Reinforce,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_rollouts == 0 {
            return Err(Error::invalid("n_rollouts", "must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate", format!("must be > 0, got {}", self.learning_rate)));
        }
        if let Estimator::ClippedSurrogate { clip_epsilon, epochs } = self.estimator {
            if !(clip_epsilon > 0.0 && clip_epsilon < 1.0) {
                return Err(Error::invalid("clip_epsilon", format!("must lie in (0, 1), got {clip_epsilon}")));
            }
            if epochs == 0 {
                return Err(Error::invalid("ppo_epochs", "must be at least 1"));
            }
        }
        Ok(())
    }
}

/// REINFORCE estimate of the objective gradient from one batch.
pub fn reinforce_gradient(objective: &Objective, state: &OptState, batch: &[Rollout]) -> Result<PolicyGradient> {
    let probs = state.policy.length_probs();
    let n = batch.len() as f64;
    let mut length = vec![0.0; probs.len()];
    let mut quality = 0.0;
    for r in batch {
        let advantage = r.reward - state.baseline;
        for (i, (g, p)) in length.iter_mut().zip(&probs).enumerate() {
            let indicator = if i + 1 == r.t { 1.0 } else { 0.0 };
            *g += advantage * (indicator - p) / n;
        }
        quality += r.quality_gradient / n;
    }
    let kl_grad = kl_length_gradient(&state.policy, &state.reference)?;
    for (g, k) in length.iter_mut().zip(&kl_grad) {
        *g -= objective.beta * k;
    }
    Ok(PolicyGradient {
        length_logits: length,
        quality_param: quality,
    })
}

fn clipped_surrogate_gradient(
    objective: &Objective,
    policy: &PolicyParams,
    reference: &PolicyParams,
    old_log_probs: &[f64],
    baseline: f64,
    batch: &[Rollout],
    clip_epsilon: f64,
) -> Result<PolicyGradient> {
    let probs = policy.length_probs();
    let n = batch.len() as f64;
    let mut length = vec![0.0; probs.len()];
    let mut quality = 0.0;
    for (r, old_lp) in batch.iter().zip(old_log_probs) {
        let advantage = r.reward - baseline;
        let ratio = (policy.log_prob(r.t) - old_lp).exp();
        let clipped = (advantage >= 0.0 && ratio > 1.0 + clip_epsilon) || (advantage < 0.0 && ratio < 1.0 - clip_epsilon);
        if !clipped {
            for (i, (g, p)) in length.iter_mut().zip(&probs).enumerate() {
                let indicator = if i + 1 == r.t { 1.0 } else { 0.0 };
                *g += advantage * ratio * (indicator - p) / n;
            }
        }
        quality += r.quality_gradient / n;
    }
    let kl_grad = kl_length_gradient(policy, reference)?;
    for (g, k) in length.iter_mut().zip(&kl_grad) {
        *g -= objective.beta * k;
    }
    Ok(PolicyGradient {
        length_logits: length,
        quality_param: quality,
    })
}

fn ascend(policy: &mut PolicyParams, grad: &PolicyGradient, learning_rate: f64) {
    for (l, g) in policy.length_logits_mut().iter_mut().zip(&grad.length_logits) {
        *l += learning_rate * g;
    }
    policy.set_quality_param(policy.quality_param() + learning_rate * grad.quality_param);
}

/// Result of one optimizer step: the new state and the batch it used.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: OptState,
    pub batch: Vec<Rollout>,
}

/// One gradient-ascent step. The reference policy is carried over untouched.
pub fn policy_gradient_step(
    objective: &Objective,
    state: &OptState,
    oracle: &OracleConfig,
    settings: &StepSettings,
    seed: u64,
) -> Result<OptState> {
    policy_gradient_step_with_batch(objective, state, oracle, settings, seed).map(|o| o.state)
}

pub fn policy_gradient_step_with_batch(
    objective: &Objective,
    state: &OptState,
    oracle: &OracleConfig,
    settings: &StepSettings,
    seed: u64,
) -> Result<StepOutcome> {
    settings.validate()?;
    let batch = rollouts(objective, &state.policy, oracle, settings.n_rollouts, seed)?;
    let mut next = state.clone();
    match settings.estimator {
        Estimator::Reinforce => {
            let grad = reinforce_gradient(objective, state, &batch)?;
            ascend(&mut next.policy, &grad, settings.learning_rate);
        }
        Estimator::ClippedSurrogate { clip_epsilon, epochs } => {
            let old: Vec<f64> = batch.iter().map(|r| state.policy.log_prob(r.t)).collect();
            for _ in 0..epochs {
                let grad = clipped_surrogate_gradient(
                    objective,
                    &next.policy,
                    &state.reference,
                    &old,
                    state.baseline,
                    &batch,
                    clip_epsilon,
                )?;
                ascend(&mut next.policy, &grad, settings.learning_rate);
            }
        }
    }
    if next.policy.length_logits().iter().any(|l| !l.is_finite()) || !next.policy.quality_param().is_finite() {
        return Err(Error::NonFinite(format!("policy parameters after iteration {}", state.iteration)));
    }
    let batch_mean = batch.iter().map(|r| r.reward).sum::<f64>() / batch.len() as f64;
    next.baseline = BASELINE_MOMENTUM * state.baseline + (1.0 - BASELINE_MOMENTUM) * batch_mean;
    next.iteration += 1;
    Ok(StepOutcome { state: next, batch })
}

/// Runs `steps` updates; update `i` draws its batch from `derive_seed(seed, 2, i)`.
pub fn train_policy(
    objective: &Objective,
    initial: PolicyParams,
    oracle: &OracleConfig,
    settings: &StepSettings,
    steps: usize,
    seed: u64,
) -> Result<OptState> {
    let mut state = OptState::new(initial);
    for i in 0..steps as u64 {
        state = policy_gradient_step(objective, &state, oracle, settings, derive_seed(seed, 2, i))?;
    }
    Ok(state)
}

/// Mean reward of `n` chains forced to length `t`.
pub fn conditional_reward(
    objective: &Objective,
    policy: &PolicyParams,
    oracle: &OracleConfig,
    t: usize,
    n: usize,
    seed: u64,
) -> Result<f64> {
    let chain = chain_of_length(policy, t);
    let mut total = 0.0;
    for i in 0..n as u64 {
        let (r, _) = reward_and_quality_gradient(objective, &chain, &rollout_oracle(oracle, seed, i))?;
        total += r;
    }
    Ok(total / n.max(1) as f64)
}

/// Smallest `t` attaining the maximum; index `i` of `values` is length `i + 1`.
pub fn argmax_length(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best + 1
}

// ---------------------------------------------------------------------------
// Ablation
// ---------------------------------------------------------------------------

/// Environment and optimizer settings shared by both ablation arms.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationSettings {
    pub t_max: usize,
    pub initial_quality_param: f64,
    pub oracle: OracleConfig,
    pub shaping: WeibullShaping,
    pub beta: f64,
    pub epochs: usize,
    pub step: StepSettings,
    pub eval_rollouts: usize,
    pub parallel: bool,
}

impl Default for AblationSettings {
    fn default() -> Self {
        Self {
            t_max: crate::chain_env::DEFAULT_T_MAX,
            initial_quality_param: DEFAULT_INITIAL_QUALITY_PARAM,
            oracle: OracleConfig::default(),
            shaping: WeibullShaping::paper(),
            beta: DEFAULT_BETA,
            epochs: DEFAULT_EPOCHS,
            step: StepSettings::reinforce(DEFAULT_ROLLOUTS, DEFAULT_POLICY_LEARNING_RATE),
            eval_rollouts: DEFAULT_EVAL_ROLLOUTS,
            parallel: true,
        }
    }
}

pub const DEFAULT_INITIAL_QUALITY_PARAM: f64 = 2.0;
pub const DEFAULT_EPOCHS: usize = 300;
pub const DEFAULT_ROLLOUTS: usize = 64;
pub const DEFAULT_POLICY_LEARNING_RATE: f64 = 1.0;
pub const DEFAULT_EVAL_ROLLOUTS: usize = 1000;
pub const MIN_ABLATION_SEEDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmKind {
    Baseline,
    WeibullShaped,
}

impl ArmKind {
    pub const ALL: [ArmKind; 2] = [ArmKind::Baseline, ArmKind::WeibullShaped];

    pub fn name(self) -> &'static str {
        match self {
            ArmKind::Baseline => "baseline",
            ArmKind::WeibullShaped => "pspo_wrs",
        }
    }

    pub fn objective(self, settings: &AblationSettings) -> Objective {
        match self {
            ArmKind::Baseline => Objective::baseline(settings.beta),
            ArmKind::WeibullShaped => Objective::weibull_shaped(settings.shaping, settings.beta),
        }
    }
}

/// Outcome of one arm on one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedResult {
    pub seed: u64,
    /// Exact `E[t]` under the final policy.
    pub mean_step_count: f64,
    /// Mean reward of the evaluation rollouts.
    pub mean_reward: f64,
    pub final_quality: f64,
    pub length_probs: Vec<f64>,
    /// Evaluation-rollout length counts, index `i` is length `i + 1`.
    pub histogram: Vec<usize>,
    /// Mean reward of evaluation chains forced to each length.
    pub reward_by_steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmReport {
    pub arm: ArmKind,
    pub objective: Objective,
    pub seeds: Vec<SeedResult>,
    pub mean_step_count: f64,
    pub std_step_count: f64,
    pub mean_reward: f64,
    pub histogram: Vec<usize>,
    pub length_probs: Vec<f64>,
    pub reward_by_steps: Vec<f64>,
}

impl ArmReport {
    fn aggregate(arm: ArmKind, objective: Objective, seeds: Vec<SeedResult>) -> Self {
        let n = seeds.len() as f64;
        let t_max = seeds[0].length_probs.len();
        let mean_step_count = seeds.iter().map(|s| s.mean_step_count).sum::<f64>() / n;
        let var = seeds.iter().map(|s| (s.mean_step_count - mean_step_count).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let mean_reward = seeds.iter().map(|s| s.mean_reward).sum::<f64>() / n;
        let histogram = (0..t_max).map(|i| seeds.iter().map(|s| s.histogram[i]).sum()).collect();
        let length_probs = (0..t_max).map(|i| seeds.iter().map(|s| s.length_probs[i]).sum::<f64>() / n).collect();
        let reward_by_steps = (0..t_max).map(|i| seeds.iter().map(|s| s.reward_by_steps[i]).sum::<f64>() / n).collect();
        Self {
            arm,
            objective,
            seeds,
            mean_step_count,
            std_step_count: var.sqrt(),
            mean_reward,
            histogram,
            length_probs,
            reward_by_steps,
        }
    }
}

/// Seed-wise comparison of mean step counts, shaped minus baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedComparison {
    pub mean_difference: f64,
    pub t_statistic: f64,
    /// One-sided p-value for "shaped arm produces longer chains".
    pub p_value: f64,
}

/// One-sided paired t-test on `differences` (H1: mean > 0).
pub fn paired_t_test(differences: &[f64]) -> PairedComparison {
    let n = differences.len() as f64;
    let mean = differences.iter().sum::<f64>() / n;
    let var = differences.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    if se == 0.0 {
        let p_value = if mean > 0.0 { 0.0 } else { 1.0 };
        let t_statistic = if mean == 0.0 { 0.0 } else { mean.signum() * f64::MAX };
        return PairedComparison {
            mean_difference: mean,
            t_statistic,
            p_value,
        };
    }
    let t_statistic = mean / se;
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("n >= 2");
    PairedComparison {
        mean_difference: mean,
        t_statistic,
        p_value: 1.0 - dist.cdf(t_statistic),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationReport {
    pub epochs: usize,
    pub beta: f64,
    pub seeds: Vec<u64>,
    pub arms: Vec<ArmReport>,
    pub step_count_comparison: PairedComparison,
}

impl AblationReport {
    pub fn arm(&self, kind: ArmKind) -> &ArmReport {
        self.arms.iter().find(|a| a.arm == kind).expect("both arms are always present")
    }
}

fn run_arm_seed(arm: ArmKind, settings: &AblationSettings, seed: u64) -> Result<SeedResult> {
    let objective = arm.objective(settings);
    let initial = PolicyParams::uniform(settings.t_max, settings.initial_quality_param)?;
    // both arms see identical rollout seeds
    let state = train_policy(&objective, initial, &settings.oracle, &settings.step, settings.epochs, seed)?;
    let eval_seed = derive_seed(seed, 3, 0);
    let eval = rollouts(&objective, &state.policy, &settings.oracle, settings.eval_rollouts, eval_seed)?;
    let mut histogram = vec![0usize; settings.t_max];
    for r in &eval {
        histogram[r.t - 1] += 1;
    }
    let mean_reward = eval.iter().map(|r| r.reward).sum::<f64>() / eval.len() as f64;
    let reward_by_steps = (1..=settings.t_max)
        .map(|t| {
            conditional_reward(
                &objective,
                &state.policy,
                &settings.oracle,
                t,
                settings.eval_rollouts,
                derive_seed(seed, 4, t as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let result = SeedResult {
        seed,
        mean_step_count: state.policy.mean_length(),
        mean_reward,
        final_quality: state.policy.quality(),
        length_probs: state.policy.length_probs(),
        histogram,
        reward_by_steps,
    };
    let finite = result.mean_step_count.is_finite()
        && result.mean_reward.is_finite()
        && result.reward_by_steps.iter().all(|v| v.is_finite());
    if !finite {
        return Err(Error::NonFinite(format!("{} arm, seed {seed}", arm.name())));
    }
    Ok(result)
}

/// Trains the product/unshaped baseline and the geomean/Weibull arm from the
/// same initial policy on every seed and aggregates the outcomes.
pub fn ablation_run(settings: &AblationSettings, seeds: &[u64]) -> Result<AblationReport> {
    if seeds.len() < MIN_ABLATION_SEEDS {
        return Err(Error::invalid(
            "seeds",
            format!("need at least {MIN_ABLATION_SEEDS}, got {}", seeds.len()),
        ));
    }
    if settings.epochs == 0 {
        return Err(Error::invalid("epochs", "must be at least 1"));
    }
    if settings.eval_rollouts == 0 {
        return Err(Error::invalid("eval_rollouts", "must be at least 1"));
    }
    settings.oracle.validate()?;
    settings.step.validate()?;
    Objective::baseline(settings.beta).validate()?;

    let jobs: Vec<(ArmKind, u64)> = ArmKind::ALL
        .iter()
        .flat_map(|&arm| seeds.iter().map(move |&s| (arm, s)))
        .collect();
    let results: Vec<SeedResult> = if settings.parallel {
        jobs.par_iter().map(|&(arm, s)| run_arm_seed(arm, settings, s)).collect::<Result<_>>()?
    } else {
        jobs.iter().map(|&(arm, s)| run_arm_seed(arm, settings, s)).collect::<Result<_>>()?
    };

    let mut results = results.into_iter();
    let arms: Vec<ArmReport> = ArmKind::ALL
        .iter()
        .map(|&arm| {
            let per_seed: Vec<SeedResult> = results.by_ref().take(seeds.len()).collect();
            ArmReport::aggregate(arm, arm.objective(settings), per_seed)
        })
        .collect();

    let differences: Vec<f64> = arms[1]
        .seeds
        .iter()
        .zip(&arms[0].seeds)
        .map(|(w, b)| w.mean_step_count - b.mean_step_count)
        .collect();
    Ok(AblationReport {
        epochs: settings.epochs,
        beta: settings.beta,
        seeds: seeds.to_vec(),
        step_count_comparison: paired_t_test(&differences),
        arms,
    })
}
