//! Step-score accumulation and step-count reward shaping.
//!
//! A reasoning chain of `t` steps carries one [`StepScore`] per step. Two
//! accumulation functions turn those into a chain reward:
//!
//! * [`accumulate_product`]: the probability that every step is correct.
//!   It shrinks as chains get longer even when each step is good.
//! * [`accumulate_geomean`]: the product normalized by step count, so a
//!   chain of equally good steps scores the same at any length.
//!
//! [`weibull_shape`] then multiplies in a step-count prior: a Weibull
//! density scaled by `C` so its peak sits near 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability in `[0, 1]` that a single reasoning step is positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StepScore(f64);

impl StepScore {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::ScoreOutOfRange(value))
        }
    }

    /// Clamps into `[0, 1]`. NaN maps to 0.
    pub fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Self(0.0)
        } else {
            Self(value.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for StepScore {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<StepScore> for f64 {
    fn from(s: StepScore) -> f64 {
        s.0
    }
}

/// Converts raw probabilities, rejecting anything outside `[0, 1]`.
pub fn scores(values: &[f64]) -> Result<Vec<StepScore>> {
    values.iter().map(|&v| StepScore::new(v)).collect()
}

/// Parameters of the adjusted Weibull shaping curve
/// `C * (k/lambda) * (t/lambda)^(k-1) * exp(-(t/lambda)^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullShaping {
    c: f64,
    k: f64,
    lambda: f64,
}

impl WeibullShaping {
    pub const PAPER_C: f64 = 10.735;
    pub const PAPER_K: f64 = 1.5;
    pub const PAPER_LAMBDA: f64 = 8.0;

    pub fn new(c: f64, k: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("c", c), ("k", k), ("lambda", lambda)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(Self { c, k, lambda })
    }

    /// `C = 10.735, k = 1.5, lambda = 8.0`.
    pub fn paper() -> Self {
        Self {
            c: Self::PAPER_C,
            k: Self::PAPER_K,
            lambda: Self::PAPER_LAMBDA,
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Location of the continuous maximum, `lambda * ((k-1)/k)^(1/k)`.
    /// Only meaningful for `k > 1`; returns 0 otherwise.
    pub fn peak_location(&self) -> f64 {
        if self.k <= 1.0 {
            return 0.0;
        }
        self.lambda * ((self.k - 1.0) / self.k).powf(1.0 / self.k)
    }
}

impl Default for WeibullShaping {
    fn default() -> Self {
        Self::paper()
    }
}

/// Product of all step scores.
pub fn accumulate_product(scores: &[StepScore]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyChain);
    }
    Ok(scores.iter().map(|s| s.value()).product())
}

/// Geometric mean of the step scores, evaluated in log space.
pub fn accumulate_geomean(scores: &[StepScore]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyChain);
    }
    if scores.iter().any(|s| s.value() == 0.0) {
        return Ok(0.0);
    }
    let mean_log = scores.iter().map(|s| s.value().ln()).sum::<f64>() / scores.len() as f64;
    // exp of a mean of non-positive logs can round a hair above 1
    Ok(mean_log.exp().min(1.0))
}

/// Adjusted Weibull shaping value at step count `t`.
///
/// At `t = 0` the density is extended by continuity: 0 for `k > 1`,
/// `C/lambda` for `k = 1`, and +inf for `k < 1`.
pub fn weibull_shape(params: &WeibullShaping, t: u32) -> f64 {
    weibull_shape_at(params, f64::from(t))
}

/// Same curve over a continuous argument `t >= 0`.
pub fn weibull_shape_at(params: &WeibullShaping, t: f64) -> f64 {
    let WeibullShaping { c, k, lambda } = *params;
    if t <= 0.0 {
        return if k > 1.0 {
            0.0
        } else if k == 1.0 {
            c / lambda
        } else {
            f64::INFINITY
        };
    }
    let x = t / lambda;
    c * (k / lambda) * x.powf(k - 1.0) * (-x.powf(k)).exp()
}

/// Step scores of one chain together with its accumulated and shaped reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEvaluation {
    pub step_scores: Vec<StepScore>,
    pub accumulated: f64,
    pub shaped: f64,
}

impl ChainEvaluation {
    pub fn steps(&self) -> usize {
        self.step_scores.len()
    }
}

/// Geometric-mean accumulation scaled by the Weibull value at the chain length.
pub fn shaped_reward(params: &WeibullShaping, scores: &[StepScore]) -> Result<ChainEvaluation> {
    let accumulated = accumulate_geomean(scores)?;
    let shaped = weibull_shape(params, scores.len() as u32) * accumulated;
    Ok(ChainEvaluation {
        step_scores: scores.to_vec(),
        accumulated,
        shaped,
    })
}
