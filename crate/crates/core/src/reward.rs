//! Verifiable rewards for affordance boxes and trajectories.
//!
//! Affordance: `total = format + IoU`.
//! Trajectory: `total = format + path + end`, with
//! `path = w_dfd·s(DFD) + w_hd·s(HD) + w_rmse·s(RMSE)` and
//! `end = exp(-k·|p_N - p*_M|²)`, where `s(d) = 1 / (1 + d/tau)`.
//!
//! A response that fails format validation earns nothing at all, not just a
//! zero format term.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    discrete_frechet, dtw, endpoint_distance, hausdorff, iou, rmse_with, BBox, Trajectory,
    DEFAULT_RMSE_SAMPLES,
};
use crate::parser::{analyze, Answer, FormatVerdict, TaskKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct PathWeights<S> {
    pub dfd: S,
    pub hd: S,
    pub rmse: S,
    /// Dynamic time warping term; off by default, used by ablations.
    pub dtw: S,
}

impl<S: Scalar> Default for PathWeights<S> {
    fn default() -> Self {
        Self {
            dfd: S::one(),
            hd: S::one(),
            rmse: S::one(),
            dtw: S::zero(),
        }
    }
}

impl<S: Scalar> PathWeights<S> {
    pub fn new(dfd: S, hd: S, rmse: S) -> Self {
        Self {
            dfd,
            hd,
            rmse,
            dtw: S::zero(),
        }
    }

    pub fn sum(&self) -> S {
        self.dfd + self.hd + self.rmse + self.dtw
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct RewardConfig<S> {
    /// Distance at which a path score falls to one half.
    pub tau: S,
    /// Endpoint decay, in inverse squared coordinate units.
    pub k: S,
    pub path_weights: PathWeights<S>,
    pub format_reward_value: S,
    /// Resampling count used to pair points for RMSE.
    pub rmse_samples: usize,
}

impl<S: Scalar> Default for RewardConfig<S> {
    fn default() -> Self {
        Self {
            tau: S::lit(100.0),
            k: S::lit(1e-4),
            path_weights: PathWeights::default(),
            format_reward_value: S::one(),
            rmse_samples: DEFAULT_RMSE_SAMPLES,
        }
    }
}

impl<S: Scalar> RewardConfig<S> {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: S| v.is_finite() && v > S::zero();
        let non_negative = |v: S| v.is_finite() && v >= S::zero();
        if !positive(self.tau) {
            return Err(Error::InvalidConfig(format!(
                "tau must be > 0, got {}",
                self.tau
            )));
        }
        if !positive(self.k) {
            return Err(Error::InvalidConfig(format!(
                "k must be > 0, got {}",
                self.k
            )));
        }
        let w = &self.path_weights;
        if ![w.dfd, w.hd, w.rmse, w.dtw].into_iter().all(non_negative) {
            return Err(Error::InvalidConfig("path weights must be >= 0".into()));
        }
        if !non_negative(self.format_reward_value) {
            return Err(Error::InvalidConfig(
                "format_reward_value must be >= 0".into(),
            ));
        }
        if self.rmse_samples < 2 {
            return Err(Error::InvalidConfig("rmse_samples must be >= 2".into()));
        }
        Ok(())
    }

    /// Largest attainable trajectory total under this config.
    pub fn max_trajectory_total(&self) -> S {
        self.format_reward_value + self.path_weights.sum() + S::one()
    }

    /// Largest attainable affordance total under this config.
    pub fn max_spatial_total(&self) -> S {
        self.format_reward_value + S::one()
    }
}

impl<S> RewardConfig<S>
where
    S: Scalar + for<'de> Deserialize<'de>,
{
    /// Loads a config from TOML, or JSON when the extension is `.json`.
    /// Missing fields take their defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentName {
    Aff,
    Dfd,
    Hd,
    Rmse,
    Dtw,
    End,
}

impl fmt::Display for ComponentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ComponentName::Aff => "aff",
            ComponentName::Dfd => "dfd",
            ComponentName::Hd => "hd",
            ComponentName::Rmse => "rmse",
            ComponentName::Dtw => "dtw",
            ComponentName::End => "end",
        };
        f.write_str(s)
    }
}

/// One reward term: a score in `[0, 1]` and the weight it enters the total with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component<S> {
    pub name: ComponentName,
    pub score: S,
    pub weight: S,
}

/// Raw trajectory distances behind the path and endpoint scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDistances<S> {
    pub dfd: S,
    pub hd: S,
    pub rmse: S,
    pub endpoint: S,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dtw: Option<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct RewardBreakdown<S> {
    pub format: S,
    pub components: Vec<Component<S>>,
    pub total: S,
    pub verdict: FormatVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distances: Option<TrajectoryDistances<S>>,
}

impl<S: Scalar> RewardBreakdown<S> {
    fn assemble(
        format: S,
        components: Vec<Component<S>>,
        verdict: FormatVerdict,
        distances: Option<TrajectoryDistances<S>>,
    ) -> Self {
        let mut out = Self {
            format,
            components,
            total: S::zero(),
            verdict,
            distances,
        };
        out.total = out.recompute_total();
        out
    }

    /// `format + Σ weight·score` over the recorded components.
    pub fn recompute_total(&self) -> S {
        self.components
            .iter()
            .fold(self.format, |acc, c| acc + c.weight * c.score)
    }

    pub fn component(&self, name: ComponentName) -> Option<&Component<S>> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn score(&self, name: ComponentName) -> Option<S> {
        self.component(name).map(|c| c.score)
    }
}

/// Maps a distance onto `(0, 1]` via `1 / (1 + d/tau)`.
pub fn distance_to_score<S: Scalar>(distance: S, tau: S) -> Result<S> {
    if !(distance >= S::zero()) || !distance.is_finite() {
        return Err(Error::InvalidDistance(
            distance.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if !(tau > S::zero()) {
        return Err(Error::InvalidConfig(format!("tau must be > 0, got {tau}")));
    }
    Ok(S::one() / (S::one() + distance / tau))
}

// Internal variant for distances produced by the geometry module, which are
// non-negative and finite by construction.
fn score<S: Scalar>(distance: S, tau: S) -> S {
    S::one() / (S::one() + distance / tau)
}

/// 1 when the two answers are equal after canonicalization, else 0.
pub fn binary_reward<S: Scalar>(predicted: &Answer<S>, truth: &Answer<S>) -> S {
    if predicted == truth {
        S::one()
    } else {
        S::zero()
    }
}

/// Affordance reward for one response against a ground-truth box.
pub fn spatial_reward<S: Scalar>(
    response: &str,
    gt: &BBox<S>,
    cfg: &RewardConfig<S>,
) -> RewardBreakdown<S> {
    let analysis = analyze::<S>(response, TaskKind::Affordance);
    let box_pred = analysis
        .parsed
        .as_ref()
        .and_then(|p| p.answer.as_bbox().copied());
    let (format, aff) = match (analysis.verdict.compliant, box_pred) {
        (true, Some(b)) => (cfg.format_reward_value, iou(&b, gt)),
        _ => (S::zero(), S::zero()),
    };
    let components = vec![Component {
        name: ComponentName::Aff,
        score: aff,
        weight: S::one(),
    }];
    RewardBreakdown::assemble(format, components, analysis.verdict, None)
}

/// Weighted path-similarity reward, `Σ w_m · s(d_m)`.
pub fn path_reward<S: Scalar>(
    pred: &Trajectory<S>,
    gt: &Trajectory<S>,
    cfg: &RewardConfig<S>,
) -> S {
    let d = measure(pred, gt, cfg);
    path_components(&d, cfg)
        .iter()
        .fold(S::zero(), |acc, c| acc + c.weight * c.score)
}

/// `exp(-k · d²)` with `d` the distance between final points.
pub fn endpoint_reward<S: Scalar>(pred: &Trajectory<S>, gt: &Trajectory<S>, k: S) -> S {
    let d = endpoint_distance(pred, gt);
    (-k * d * d).exp()
}

/// Trajectory reward for one response against a ground-truth path.
pub fn trajectory_reward<S: Scalar>(
    response: &str,
    gt: &Trajectory<S>,
    cfg: &RewardConfig<S>,
) -> RewardBreakdown<S> {
    let analysis = analyze::<S>(response, TaskKind::Trajectory);
    let pred = analysis
        .parsed
        .as_ref()
        .and_then(|p| p.answer.as_trajectory())
        .filter(|_| analysis.verdict.compliant);

    match pred {
        Some(pred) => {
            let d = measure(pred, gt, cfg);
            let mut components = path_components(&d, cfg);
            components.push(Component {
                name: ComponentName::End,
                score: (-cfg.k * d.endpoint * d.endpoint).exp(),
                weight: S::one(),
            });
            RewardBreakdown::assemble(
                cfg.format_reward_value,
                components,
                analysis.verdict,
                Some(d),
            )
        }
        None => {
            let mut components = zero_path_components(cfg);
            components.push(Component {
                name: ComponentName::End,
                score: S::zero(),
                weight: S::one(),
            });
            RewardBreakdown::assemble(S::zero(), components, analysis.verdict, None)
        }
    }
}

/// Dispatches on the ground-truth kind.
pub fn score_response<S: Scalar>(
    response: &str,
    gt: &Answer<S>,
    cfg: &RewardConfig<S>,
) -> RewardBreakdown<S> {
    match gt {
        Answer::Affordance(b) => spatial_reward(response, b, cfg),
        Answer::Trajectory(t) => trajectory_reward(response, t, cfg),
    }
}

fn measure<S: Scalar>(
    pred: &Trajectory<S>,
    gt: &Trajectory<S>,
    cfg: &RewardConfig<S>,
) -> TrajectoryDistances<S> {
    TrajectoryDistances {
        dfd: discrete_frechet(pred, gt),
        hd: hausdorff(pred, gt),
        rmse: rmse_with(pred, gt, cfg.rmse_samples),
        endpoint: endpoint_distance(pred, gt),
        dtw: (cfg.path_weights.dtw > S::zero()).then(|| dtw(pred, gt)),
    }
}

fn path_components<S: Scalar>(
    d: &TrajectoryDistances<S>,
    cfg: &RewardConfig<S>,
) -> Vec<Component<S>> {
    let w = &cfg.path_weights;
    let mut out = vec![
        Component {
            name: ComponentName::Dfd,
            score: score(d.dfd, cfg.tau),
            weight: w.dfd,
        },
        Component {
            name: ComponentName::Hd,
            score: score(d.hd, cfg.tau),
            weight: w.hd,
        },
        Component {
            name: ComponentName::Rmse,
            score: score(d.rmse, cfg.tau),
            weight: w.rmse,
        },
    ];
    if let Some(dtw) = d.dtw {
        out.push(Component {
            name: ComponentName::Dtw,
            score: score(dtw, cfg.tau),
            weight: w.dtw,
        });
    }
    out
}

fn zero_path_components<S: Scalar>(cfg: &RewardConfig<S>) -> Vec<Component<S>> {
    let w = &cfg.path_weights;
    let mut out: Vec<Component<S>> = [
        (ComponentName::Dfd, w.dfd),
        (ComponentName::Hd, w.hd),
        (ComponentName::Rmse, w.rmse),
    ]
    .into_iter()
    .map(|(name, weight)| Component {
        name,
        score: S::zero(),
        weight,
    })
    .collect();
    if w.dtw > S::zero() {
        out.push(Component {
            name: ComponentName::Dtw,
            score: S::zero(),
            weight: w.dtw,
        });
    }
    out
}
