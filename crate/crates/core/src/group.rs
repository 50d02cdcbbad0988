//! Group-relative advantages, KL penalty estimates and the regularized
//! objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimConfig {
    /// KL coefficient.
    pub beta: f64,
    pub group_size: usize,
    /// Groups whose reward std falls below this get zero advantages.
    pub epsilon: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            beta: 0.04,
            group_size: 8,
            epsilon: 1e-8,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "beta must be >= 0, got {}",
                self.beta
            )));
        }
        if self.group_size == 0 {
            return Err(Error::InvalidConfig("group_size must be >= 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig("epsilon must be > 0".into()));
        }
        Ok(())
    }
}

/// Rewards of one group and their normalized advantages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScore<S> {
    pub rewards: Vec<S>,
    pub advantages: Vec<S>,
}

impl<S: Scalar> GroupScore<S> {
    pub fn new(rewards: Vec<S>, epsilon: S) -> Result<Self> {
        let advantages = group_advantages(&rewards, epsilon)?;
        Ok(Self {
            rewards,
            advantages,
        })
    }

    pub fn group_size(&self) -> usize {
        self.rewards.len()
    }
}

/// Mean and population standard deviation.
pub fn mean_std<S: Scalar>(values: &[S]) -> (S, S) {
    let n = S::from_count(values.len());
    let mean = values.iter().copied().sum::<S>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<S>() / n;
    (mean, var.sqrt())
}

/// `A_i = (r_i - mean) / std` using the population std. Groups with
/// `std < epsilon` carry no signal and get all-zero advantages.
pub fn group_advantages<S: Scalar>(rewards: &[S], epsilon: S) -> Result<Vec<S>> {
    if rewards.is_empty() {
        return Err(Error::EmptyGroup);
    }
    if let Some(i) = rewards.iter().position(|r| !r.is_finite()) {
        return Err(Error::NonFiniteValue(i));
    }
    let (mean, std) = mean_std(rewards);
    if std < epsilon {
        return Ok(vec![S::zero(); rewards.len()]);
    }
    Ok(rewards.iter().map(|&r| (r - mean) / std).collect())
}

/// Per-sample KL estimate `exp(Δ) - Δ - 1` with `Δ = logp_ref - logp_policy`.
///
/// Unbiased for `KL(policy || ref)` when samples come from the policy, and
/// never negative.
pub fn kl_penalty<S: Scalar>(logp_policy: &[S], logp_ref: &[S]) -> Result<Vec<S>> {
    if logp_policy.len() != logp_ref.len() {
        return Err(Error::LengthMismatch {
            left: logp_policy.len(),
            right: logp_ref.len(),
        });
    }
    logp_policy
        .iter()
        .zip(logp_ref)
        .enumerate()
        .map(|(i, (&lp, &lr))| {
            if !lp.is_finite() || !lr.is_finite() {
                return Err(Error::NonFiniteValue(i));
            }
            let delta = lr - lp;
            // exp_m1 keeps precision for small Δ; clamp rounding noise at 0
            Ok((delta.exp_m1() - delta).max(S::zero()))
        })
        .collect()
}

/// Mean over samples of `r_i - beta·kl_i`.
pub fn rlvr_objective<S: Scalar>(rewards: &[S], kl: &[S], beta: S) -> Result<S> {
    if rewards.len() != kl.len() {
        return Err(Error::LengthMismatch {
            left: rewards.len(),
            right: kl.len(),
        });
    }
    if rewards.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let sum: S = rewards.iter().zip(kl).map(|(&r, &k)| r - beta * k).sum();
    Ok(sum / S::from_count(rewards.len()))
}
