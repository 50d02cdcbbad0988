use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::policy::{
    gaussian_kl, sample_group, update_policy, ToyPolicy, UpdateConfig, DEFAULT_LOG_SIGMA,
};
use crate::error::{Error, Result};
use crate::geometry::{discrete_frechet, endpoint_distance, hausdorff, rmse, Trajectory};
use crate::group::group_advantages;
use crate::parser::{render_answer, Answer};
use crate::reward::{trajectory_reward, PathWeights, RewardConfig};

/// Reward formulations compared by the ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RewardVariant {
    /// Format + DFD + HD + RMSE + endpoint.
    Full,
    /// Format + DTW + endpoint.
    DtwEnd,
    /// Format + HD + endpoint.
    HdEnd,
    /// Format + RMSE + endpoint.
    RmseEnd,
}

impl RewardVariant {
    pub const ALL: [RewardVariant; 4] = [
        RewardVariant::Full,
        RewardVariant::DtwEnd,
        RewardVariant::HdEnd,
        RewardVariant::RmseEnd,
    ];

    pub fn path_weights(&self) -> PathWeights<f64> {
        let (dfd, hd, rmse, dtw) = match self {
            RewardVariant::Full => (1.0, 1.0, 1.0, 0.0),
            RewardVariant::DtwEnd => (0.0, 0.0, 0.0, 1.0),
            RewardVariant::HdEnd => (0.0, 1.0, 0.0, 0.0),
            RewardVariant::RmseEnd => (0.0, 0.0, 1.0, 0.0),
        };
        PathWeights { dfd, hd, rmse, dtw }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RewardVariant::Full => "FULL",
            RewardVariant::DtwEnd => "DTW_END",
            RewardVariant::HdEnd => "HD_END",
            RewardVariant::RmseEnd => "RMSE_END",
        }
    }
}

impl fmt::Display for RewardVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn default_ground_truth() -> Trajectory<f64> {
    Trajectory::from_pairs([
        (200.0, 700.0),
        (330.0, 520.0),
        (480.0, 410.0),
        (650.0, 360.0),
        (820.0, 340.0),
    ])
    .expect("static trajectory")
}

pub fn default_initial_mean() -> Trajectory<f64> {
    Trajectory::from_pairs((0..5).map(|i| (150.0 + 175.0 * i as f64, 500.0)))
        .expect("static trajectory")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub reward_variant: RewardVariant,
    pub steps: usize,
    pub group_size: usize,
    pub learning_rate: f64,
    pub beta: f64,
    pub seed: u64,
    /// Std floor for group normalization.
    pub epsilon: f64,
    pub gt: Trajectory<f64>,
    /// Starting policy mean; also the reference policy's mean.
    pub initial_mean: Trajectory<f64>,
    pub initial_log_sigma: f64,
    /// Distance scale and endpoint decay; path weights come from the variant.
    pub tau: f64,
    pub k: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            reward_variant: RewardVariant::Full,
            steps: 300,
            group_size: 8,
            learning_rate: 0.05,
            beta: 0.04,
            seed: 7,
            epsilon: 1e-8,
            gt: default_ground_truth(),
            initial_mean: default_initial_mean(),
            initial_log_sigma: DEFAULT_LOG_SIGMA,
            tau: 100.0,
            k: 1e-4,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be >= 1".into()));
        }
        if self.group_size == 0 {
            return Err(Error::InvalidConfig("group_size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidConfig("beta must be >= 0".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig("epsilon must be > 0".into()));
        }
        self.reward_config().validate()?;
        ToyPolicy::new(self.initial_mean.clone(), self.initial_log_sigma)?;
        Ok(())
    }

    pub fn reward_config(&self) -> RewardConfig<f64> {
        RewardConfig {
            tau: self.tau,
            k: self.k,
            path_weights: self.reward_variant.path_weights(),
            ..RewardConfig::default()
        }
    }
}

/// Group means at one training step, measured on the samples the policy drew
/// before that step's update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub reward: f64,
    pub dfd: f64,
    pub hd: f64,
    pub rmse: f64,
    pub endpoint: f64,
    pub kl: f64,
}

impl StepRecord {
    /// Mean of the three path distances.
    pub fn path_error(&self) -> f64 {
        (self.dfd + self.hd + self.rmse) / 3.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub variant: RewardVariant,
    pub seed: u64,
    pub records: Vec<StepRecord>,
}

impl LearningCurve {
    pub fn first(&self) -> &StepRecord {
        &self.records[0]
    }

    pub fn last(&self) -> &StepRecord {
        &self.records[self.records.len() - 1]
    }

    /// CSV with header `step,reward,dfd,hd,rmse,endpoint,kl`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)
                .map_err(|e| Error::Serialize(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Serialize(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Serialize(e.to_string()))
    }
}

/// Runs the sample → reward → advantage → update loop for one variant.
///
/// Every sample is rendered as a full tagged response and scored through the
/// reward engine, so format gating applies exactly as it would to a model.
pub fn run_simulation(cfg: &SimConfig) -> Result<LearningCurve> {
    cfg.validate()?;
    let reference = ToyPolicy::new(cfg.initial_mean.clone(), cfg.initial_log_sigma)?;
    let mut policy = reference.clone();
    let reward_cfg = cfg.reward_config();
    let update_cfg = UpdateConfig {
        learning_rate: cfg.learning_rate,
        beta: cfg.beta,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = cfg.group_size as f64;
    let mut records = Vec::with_capacity(cfg.steps);

    for step in 1..=cfg.steps {
        let samples = sample_group(&policy, cfg.group_size, &mut rng);
        let mut rewards = Vec::with_capacity(samples.len());
        let mut rec = StepRecord {
            step,
            reward: 0.0,
            dfd: 0.0,
            hd: 0.0,
            rmse: 0.0,
            endpoint: 0.0,
            kl: gaussian_kl(&policy, &reference)?,
        };
        for s in &samples {
            let response = render_answer("", &Answer::Trajectory(s.trajectory.clone()));
            let r = trajectory_reward(&response, &cfg.gt, &reward_cfg).total;
            rewards.push(r);
            rec.reward += r / g;
            rec.dfd += discrete_frechet(&s.trajectory, &cfg.gt) / g;
            rec.hd += hausdorff(&s.trajectory, &cfg.gt) / g;
            rec.rmse += rmse(&s.trajectory, &cfg.gt) / g;
            rec.endpoint += endpoint_distance(&s.trajectory, &cfg.gt) / g;
        }
        records.push(rec);

        let advantages = group_advantages(&rewards, cfg.epsilon)?;
        policy = update_policy(&policy, &reference, &samples, &advantages, &update_cfg)?;
    }

    Ok(LearningCurve {
        variant: cfg.reward_variant,
        seed: cfg.seed,
        records,
    })
}

/// Runs every variant with the same seed (hence the same noise stream).
pub fn run_ablation(
    cfg: &SimConfig,
    variants: &[RewardVariant],
) -> Result<BTreeMap<RewardVariant, LearningCurve>> {
    variants
        .par_iter()
        .map(|&v| {
            let c = SimConfig {
                reward_variant: v,
                ..cfg.clone()
            };
            run_simulation(&c).map(|curve| (v, curve))
        })
        .collect()
}

/// Maps each curve's path error onto `[-1, 0]` as `-(m - min)/(max - min)`,
/// with min and max taken over every record of every curve in the set.
/// Higher is better. A set with no spread maps to all zeros.
pub fn normalized_performance(curves: &[&LearningCurve]) -> Vec<Vec<f64>> {
    let all = curves
        .iter()
        .flat_map(|c| c.records.iter().map(StepRecord::path_error));
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
        (lo.min(m), hi.max(m))
    });
    let span = hi - lo;
    curves
        .iter()
        .map(|c| {
            c.records
                .iter()
                .map(|r| {
                    if span > 0.0 {
                        -(r.path_error() - lo) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// A set of runs: every listed variant under every listed seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    #[serde(default = "default_variants")]
    pub variants: Vec<RewardVariant>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(flatten)]
    pub base: SimConfig,
}

fn default_variants() -> Vec<RewardVariant> {
    RewardVariant::ALL.to_vec()
}

fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}

impl Default for SimulationPlan {
    fn default() -> Self {
        Self {
            variants: default_variants(),
            seeds: default_seeds(),
            base: SimConfig::default(),
        }
    }
}

impl SimulationPlan {
    /// Loads a plan from TOML, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let plan: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        };
        if plan.variants.is_empty() || plan.seeds.is_empty() {
            return Err(Error::InvalidConfig(
                "variants and seeds must be non-empty".into(),
            ));
        }
        plan.base.validate()?;
        Ok(plan)
    }

    /// Runs all (variant, seed) pairs; results are ordered by variant then seed.
    pub fn run(&self) -> Result<Vec<LearningCurve>> {
        let jobs: Vec<(RewardVariant, u64)> = self
            .variants
            .iter()
            .flat_map(|&v| self.seeds.iter().map(move |&s| (v, s)))
            .collect();
        jobs.par_iter()
            .map(|&(v, seed)| {
                run_simulation(&SimConfig {
                    reward_variant: v,
                    seed,
                    ..self.base.clone()
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: RewardVariant,
    pub seeds: Vec<u64>,
    pub initial_path_error: Vec<f64>,
    pub final_path_error: Vec<f64>,
    pub median_initial_path_error: f64,
    pub median_final_path_error: f64,
    pub median_final_endpoint: f64,
    /// Median over seeds of the final normalized performance.
    pub median_final_performance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub steps: usize,
    pub group_size: usize,
    pub learning_rate: f64,
    pub beta: f64,
    /// Definition of the performance axis.
    pub performance_transform: String,
    pub variants: Vec<VariantSummary>,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Summarizes a run set; `curves` may be in any order.
pub fn summarize(base: &SimConfig, curves: &[LearningCurve]) -> SimulationSummary {
    let refs: Vec<&LearningCurve> = curves.iter().collect();
    let perf = normalized_performance(&refs);
    let mut by_variant: BTreeMap<RewardVariant, Vec<(usize, &LearningCurve)>> = BTreeMap::new();
    for (i, c) in curves.iter().enumerate() {
        by_variant.entry(c.variant).or_default().push((i, c));
    }
    let variants = by_variant
        .into_iter()
        .map(|(variant, mut runs)| {
            runs.sort_by_key(|(_, c)| c.seed);
            let initial: Vec<f64> = runs.iter().map(|(_, c)| c.first().path_error()).collect();
            let finals: Vec<f64> = runs.iter().map(|(_, c)| c.last().path_error()).collect();
            let endpoints: Vec<f64> = runs.iter().map(|(_, c)| c.last().endpoint).collect();
            let final_perf: Vec<f64> = runs
                .iter()
                .map(|(i, _)| *perf[*i].last().expect("non-empty curve"))
                .collect();
            VariantSummary {
                variant,
                seeds: runs.iter().map(|(_, c)| c.seed).collect(),
                median_initial_path_error: median(&initial),
                median_final_path_error: median(&finals),
                median_final_endpoint: median(&endpoints),
                median_final_performance: median(&final_perf),
                initial_path_error: initial,
                final_path_error: finals,
            }
        })
        .collect();
    SimulationSummary {
        steps: base.steps,
        group_size: base.group_size,
        learning_rate: base.learning_rate,
        beta: base.beta,
        performance_transform:
            "performance = -(m - min) / (max - min), m = (DFD + HD + RMSE) / 3, min/max over all records of the run set"
                .into(),
        variants,
    }
}

/// Writes one CSV per curve (`<variant>_seed<seed>.csv`) and `summary.json`.
pub fn write_outputs(dir: &Path, base: &SimConfig, curves: &[LearningCurve]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for c in curves {
        let path = dir.join(format!(
            "{}_seed{}.csv",
            c.variant.as_str().to_lowercase(),
            c.seed
        ));
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        c.write_csv(std::io::BufWriter::new(file))?;
    }
    let summary = summarize(base, curves);
    let path = dir.join("summary.json");
    let text =
        serde_json::to_string_pretty(&summary).map_err(|e| Error::Serialize(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(())
}
