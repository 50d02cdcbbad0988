use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Trajectory};
use crate::parser::{MAX_TRAJECTORY_POINTS, MIN_TRAJECTORY_POINTS};

pub const DEFAULT_LOG_SIGMA: f64 = 3.401_197_381_662_155; // ln 30
pub const MIN_LOG_SIGMA: f64 = 0.0; // ln 1
pub const MAX_LOG_SIGMA: f64 = 4.605_170_185_988_092; // ln 100

/// Isotropic Gaussian over the flattened waypoints of a fixed-length path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyPolicy {
    mean: Trajectory<f64>,
    log_sigma: f64,
}

/// One draw from the policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub trajectory: Trajectory<f64>,
    /// Exact Gaussian log-density of `trajectory` under the sampling policy.
    pub log_prob: f64,
}

impl ToyPolicy {
    pub fn new(mean: Trajectory<f64>, log_sigma: f64) -> Result<Self> {
        if !(MIN_TRAJECTORY_POINTS..=MAX_TRAJECTORY_POINTS).contains(&mean.len()) {
            return Err(Error::InvalidConfig(format!(
                "policy length must be in [{MIN_TRAJECTORY_POINTS}, {MAX_TRAJECTORY_POINTS}], got {}",
                mean.len()
            )));
        }
        if !log_sigma.is_finite() {
            return Err(Error::InvalidConfig("log_sigma must be finite".into()));
        }
        Ok(Self { mean, log_sigma })
    }

    pub fn mean(&self) -> &Trajectory<f64> {
        &self.mean
    }

    pub fn log_sigma(&self) -> f64 {
        self.log_sigma
    }

    pub fn sigma(&self) -> f64 {
        self.log_sigma.exp()
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dimension of the flattened waypoint vector.
    pub fn dim(&self) -> usize {
        2 * self.mean.len()
    }

    /// `log N(t; mean, sigma² I)`.
    pub fn log_prob(&self, t: &Trajectory<f64>) -> Result<f64> {
        if t.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: t.len(),
                right: self.len(),
            });
        }
        let sq: f64 = t
            .points()
            .iter()
            .zip(self.mean.points())
            .map(|(p, m)| p.distance_squared(m))
            .sum();
        Ok(self.log_density(sq))
    }

    fn log_density(&self, squared_offset: f64) -> f64 {
        let d = self.dim() as f64;
        let var = (2.0 * self.log_sigma).exp();
        -0.5 * squared_offset / var
            - d * self.log_sigma
            - 0.5 * d * (2.0 * std::f64::consts::PI).ln()
    }
}

/// Draws `count` trajectories `mean + sigma·z` with `z ~ N(0, I)`.
///
/// Normals are drawn point by point, x before y, so a given RNG state yields
/// the same noise for any policy of the same length.
pub fn sample_group<R: Rng + ?Sized>(policy: &ToyPolicy, count: usize, rng: &mut R) -> Vec<Sample> {
    let sigma = policy.sigma();
    (0..count)
        .map(|_| {
            let mut sq = 0.0;
            let points: Vec<Point2<f64>> = policy
                .mean
                .points()
                .iter()
                .map(|m| {
                    let zx: f64 = rng.sample(StandardNormal);
                    let zy: f64 = rng.sample(StandardNormal);
                    sq += (sigma * zx).powi(2) + (sigma * zy).powi(2);
                    Point2::new(m.x + sigma * zx, m.y + sigma * zy)
                })
                .collect();
            Sample {
                trajectory: Trajectory::new(points).expect("finite samples"),
                log_prob: policy.log_density(sq),
            }
        })
        .collect()
}

/// Closed-form `KL(policy || reference)` between two isotropic Gaussians.
pub fn gaussian_kl(policy: &ToyPolicy, reference: &ToyPolicy) -> Result<f64> {
    if policy.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: policy.len(),
            right: reference.len(),
        });
    }
    let d = policy.dim() as f64;
    let var_p = (2.0 * policy.log_sigma).exp();
    let var_q = (2.0 * reference.log_sigma).exp();
    let mean_sq: f64 = policy
        .mean
        .points()
        .iter()
        .zip(reference.mean.points())
        .map(|(a, b)| a.distance_squared(b))
        .sum();
    let kl = d * (reference.log_sigma - policy.log_sigma)
        + 0.5 * d * (var_p / var_q - 1.0)
        + 0.5 * mean_sq / var_q;
    Ok(kl.max(0.0))
}

/// Step parameters for [`update_policy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateConfig {
    pub learning_rate: f64,
    pub beta: f64,
}

/// One ascent step on `E[A · log π] - beta · KL(π || ref)`.
///
/// The score-function gradient is preconditioned by the inverse Fisher
/// information of the isotropic Gaussian (`sigma²` for the mean, `1/(2D)` for
/// `log sigma`), which makes step sizes scale-free. The KL term is applied as
/// a proximal step toward the reference, so it contracts toward `ref` for any
/// `beta` without overshooting. `log sigma` is clamped to `[ln 1, ln 100]`.
pub fn update_policy(
    policy: &ToyPolicy,
    reference: &ToyPolicy,
    samples: &[Sample],
    advantages: &[f64],
    cfg: &UpdateConfig,
) -> Result<ToyPolicy> {
    if samples.len() != advantages.len() {
        return Err(Error::LengthMismatch {
            left: samples.len(),
            right: advantages.len(),
        });
    }
    if policy.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: policy.len(),
            right: reference.len(),
        });
    }
    let n = policy.len();
    let d = policy.dim() as f64;
    let var = (2.0 * policy.log_sigma).exp();
    let var_ref = (2.0 * reference.log_sigma).exp();
    let lr = cfg.learning_rate;

    // natural-gradient score terms, averaged over the group
    let mut mean_step = vec![Point2::new(0.0, 0.0); n];
    let mut log_sigma_step = 0.0;
    if !samples.is_empty() {
        let g = samples.len() as f64;
        for (s, &a) in samples.iter().zip(advantages) {
            if a == 0.0 {
                continue;
            }
            let mut sq = 0.0;
            for ((step, o), m) in mean_step
                .iter_mut()
                .zip(s.trajectory.points())
                .zip(policy.mean.points())
            {
                step.x += a * (o.x - m.x) / g;
                step.y += a * (o.y - m.y) / g;
                sq += o.distance_squared(m);
            }
            log_sigma_step += a * (sq / var - d) / (2.0 * d) / g;
        }
    }

    let mean_pull = lr * cfg.beta * var / var_ref;
    let sigma_pull = lr * cfg.beta;
    let points: Vec<Point2<f64>> = policy
        .mean
        .points()
        .iter()
        .zip(&mean_step)
        .zip(reference.mean.points())
        .map(|((m, step), r)| {
            let x = m.x + lr * step.x;
            let y = m.y + lr * step.y;
            Point2::new(
                (x + mean_pull * r.x) / (1.0 + mean_pull),
                (y + mean_pull * r.y) / (1.0 + mean_pull),
            )
        })
        .collect();
    let log_sigma = (policy.log_sigma + lr * log_sigma_step + sigma_pull * reference.log_sigma)
        / (1.0 + sigma_pull);

    Ok(ToyPolicy {
        mean: Trajectory::new(points)?,
        log_sigma: log_sigma.clamp(MIN_LOG_SIGMA, MAX_LOG_SIGMA),
    })
}
