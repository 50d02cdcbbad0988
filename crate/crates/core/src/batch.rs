//! Batch-first entry points for foreign-language bindings.
//!
//! Each call scores a whole batch so callers cross the language boundary
//! once per group, not once per sample. Errors carry [`Error::code`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::group_advantages;
use crate::parser::{Answer, TaskKind};
use crate::reward::{score_response, ComponentName, RewardConfig};

pub const CONFIG_KEYS: [&str; 8] = [
    "tau",
    "k",
    "w_dfd",
    "w_hd",
    "w_rmse",
    "w_dtw",
    "format_reward_value",
    "rmse_samples",
];

/// Aligned responses and ground truths of a single task kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRequest {
    pub responses: Vec<String>,
    pub ground_truths: Vec<Answer<f64>>,
    /// Overrides of [`RewardConfig`] fields, keyed by [`CONFIG_KEYS`].
    #[serde(default)]
    pub config: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchScore {
    pub total: f64,
    pub components: BTreeMap<ComponentName, f64>,
    pub compliant: bool,
}

/// Applies flat key/value overrides on top of the default config.
pub fn config_from_map(map: &BTreeMap<String, f64>) -> Result<RewardConfig<f64>> {
    let mut cfg = RewardConfig::<f64>::default();
    for (key, &v) in map {
        match key.as_str() {
            "tau" => cfg.tau = v,
            "k" => cfg.k = v,
            "w_dfd" => cfg.path_weights.dfd = v,
            "w_hd" => cfg.path_weights.hd = v,
            "w_rmse" => cfg.path_weights.rmse = v,
            "w_dtw" => cfg.path_weights.dtw = v,
            "format_reward_value" => cfg.format_reward_value = v,
            "rmse_samples" => {
                if !(v >= 2.0 && v.fract() == 0.0 && v <= u32::MAX as f64) {
                    return Err(Error::InvalidConfig(format!(
                        "rmse_samples must be an integer >= 2, got {v}"
                    )));
                }
                cfg.rmse_samples = v as usize;
            }
            other => return Err(Error::UnknownConfigKey(other.to_string())),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Scores every response against its ground truth. All validation happens
/// before any scoring.
pub fn score_batch(req: &BatchRequest) -> Result<Vec<BatchScore>> {
    if req.responses.len() != req.ground_truths.len() {
        return Err(Error::LengthMismatch {
            left: req.responses.len(),
            right: req.ground_truths.len(),
        });
    }
    let cfg = config_from_map(&req.config)?;
    if let Some(first) = req.ground_truths.first() {
        let kind: TaskKind = first.kind();
        if let Some(index) = req.ground_truths.iter().position(|g| g.kind() != kind) {
            return Err(Error::MixedTaskKinds {
                expected: kind.as_str(),
                found: req.ground_truths[index].kind().as_str(),
                index,
            });
        }
    }
    Ok(req
        .responses
        .par_iter()
        .zip(&req.ground_truths)
        .map(|(resp, gt)| {
            let b = score_response(resp, gt, &cfg);
            BatchScore {
                total: b.total,
                components: b.components.iter().map(|c| (c.name, c.score)).collect(),
                compliant: b.verdict.compliant,
            }
        })
        .collect())
}

/// Group advantages for each inner list.
pub fn batch_advantages(groups: &[Vec<f64>], epsilon: f64) -> Result<Vec<Vec<f64>>> {
    groups
        .par_iter()
        .map(|g| group_advantages(g, epsilon))
        .collect()
}
