//! Process-supervised reward scoring, nonlinear reward shaping and
//! KL-regularized policy optimization on a synthetic chain-generation task.
//!
//! * [`reward_math`]: step-score accumulation and adjusted Weibull shaping
//! * [`prm`]: linear softmax step classifier and pairwise preference loss
//! * [`chain_env`]: seeded chain generator and step-scoring oracle
//! * [`policy_opt`]: objectives, exact KL, REINFORCE updates, ablations
//! * [`experiment`]: config file and the commands behind the `pspo` binary

pub mod chain_env;
pub mod error;
pub mod experiment;
pub mod policy_opt;
pub mod prm;
pub mod reward_math;

pub use error::{Error, Result};
