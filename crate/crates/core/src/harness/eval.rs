use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::records::EvalRecord;
use crate::error::{Error, Result};
use crate::geometry::{discrete_frechet, hausdorff, iou, rmse_with, DEFAULT_RMSE_SAMPLES};
use crate::parser::{analyze, analyze_payload, Analysis, TaskKind};

/// Distance charged to an unparseable trajectory under the penalize policy:
/// the diagonal of the coordinate square.
pub const FAILURE_DISTANCE: f64 = 1000.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailurePolicy {
    /// Unparseable predictions are left out of the means.
    Exclude,
    /// Unparseable predictions score IoU 0 and distance `1000·√2`.
    Penalize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskSelection {
    Affordance,
    Trajectory,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Predictions are bare payloads rather than tagged responses.
    pub pre_parsed: bool,
    pub failure_policy: FailurePolicy,
    pub rmse_samples: usize,
    /// Worker threads; `None` scores serially.
    pub workers: Option<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            pre_parsed: false,
            failure_policy: FailurePolicy::Exclude,
            rmse_samples: DEFAULT_RMSE_SAMPLES,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffordanceScore {
    pub id: String,
    pub compliant: bool,
    /// `None` when the prediction did not parse.
    pub iou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryScore {
    pub id: String,
    pub compliant: bool,
    pub dfd: Option<f64>,
    pub hd: Option<f64>,
    pub rmse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffordanceMetrics {
    pub records: usize,
    pub parse_failures: usize,
    /// Fraction of records whose response passed format validation.
    pub format_compliance: f64,
    /// Mean IoU in percent; `None` when nothing could be scored.
    pub mean_iou: Option<f64>,
    pub per_record: Vec<AffordanceScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetrics {
    pub records: usize,
    pub parse_failures: usize,
    pub format_compliance: f64,
    pub mean_dfd: Option<f64>,
    pub mean_hd: Option<f64>,
    pub mean_rmse: Option<f64>,
    /// `(mean_dfd + mean_hd + mean_rmse) / 3`.
    pub avg: Option<f64>,
    pub per_record: Vec<TrajectoryScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: String,
    pub record_count: usize,
    pub iou_aggregation: String,
    pub rmse_alignment: String,
    pub failure_policy: FailurePolicy,
    pub affordance: Option<AffordanceMetrics>,
    pub trajectory: Option<TrajectoryMetrics>,
}

impl MetricsReport {
    pub fn parse_failures(&self) -> usize {
        self.affordance.as_ref().map_or(0, |a| a.parse_failures)
            + self.trajectory.as_ref().map_or(0, |t| t.parse_failures)
    }

    /// Compliance over all evaluated records.
    pub fn format_compliance(&self) -> Option<f64> {
        let mut n = 0usize;
        let mut ok = 0.0;
        if let Some(a) = &self.affordance {
            n += a.records;
            ok += a.format_compliance * a.records as f64;
        }
        if let Some(t) = &self.trajectory {
            n += t.records;
            ok += t.format_compliance * t.records as f64;
        }
        (n > 0).then(|| ok / n as f64)
    }
}

fn analyze_record(rec: &EvalRecord, opts: &EvalOptions) -> Analysis<f64> {
    if opts.pre_parsed {
        analyze_payload(&rec.prediction, rec.task)
    } else {
        analyze(&rec.prediction, rec.task)
    }
}

/// Scores records in parallel when requested; output order follows input.
fn score_all<T, F>(records: &[&EvalRecord], opts: &EvalOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&EvalRecord) -> T + Sync + Send,
{
    match opts.workers {
        Some(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            Ok(pool.install(|| records.par_iter().map(|r| f(r)).collect()))
        }
        _ => Ok(records.iter().map(|r| f(r)).collect()),
    }
}

fn sorted_pool(records: &[EvalRecord], task: TaskKind) -> Vec<&EvalRecord> {
    let mut pool: Vec<&EvalRecord> = records.iter().filter(|r| r.task == task).collect();
    pool.sort_by(|a, b| a.id.cmp(&b.id));
    pool
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mean IoU (percent) over the affordance records in `records`.
///
/// Records are reduced in id order, so input order and worker count never
/// change the result.
pub fn evaluate_affordance(
    records: &[EvalRecord],
    opts: &EvalOptions,
) -> Result<AffordanceMetrics> {
    let pool = sorted_pool(records, TaskKind::Affordance);
    if pool.is_empty() {
        return Err(Error::EmptyPool("affordance"));
    }
    let per_record = score_all(&pool, opts, |rec| {
        let a = analyze_record(rec, opts);
        let gt = rec.ground_truth.as_bbox().expect("affordance gt");
        let iou = a
            .parsed
            .as_ref()
            .and_then(|p| p.answer.as_bbox())
            .map(|b| iou(b, gt));
        AffordanceScore {
            id: rec.id.clone(),
            compliant: a.verdict.compliant,
            iou,
        }
    })?;

    let failures = per_record.iter().filter(|s| s.iou.is_none()).count();
    let compliant = per_record.iter().filter(|s| s.compliant).count();
    let ious = per_record.iter().filter_map(|s| match opts.failure_policy {
        FailurePolicy::Exclude => s.iou,
        FailurePolicy::Penalize => Some(s.iou.unwrap_or(0.0)),
    });
    Ok(AffordanceMetrics {
        records: pool.len(),
        parse_failures: failures,
        format_compliance: compliant as f64 / pool.len() as f64,
        mean_iou: mean(ious).map(|m| m * 100.0),
        per_record,
    })
}

/// Mean DFD, HD and RMSE over the trajectory records in `records`.
pub fn evaluate_trajectory(
    records: &[EvalRecord],
    opts: &EvalOptions,
) -> Result<TrajectoryMetrics> {
    let pool = sorted_pool(records, TaskKind::Trajectory);
    if pool.is_empty() {
        return Err(Error::EmptyPool("trajectory"));
    }
    let per_record = score_all(&pool, opts, |rec| {
        let a = analyze_record(rec, opts);
        let gt = rec.ground_truth.as_trajectory().expect("trajectory gt");
        let pred = a.parsed.as_ref().and_then(|p| p.answer.as_trajectory());
        TrajectoryScore {
            id: rec.id.clone(),
            compliant: a.verdict.compliant,
            dfd: pred.map(|p| discrete_frechet(p, gt)),
            hd: pred.map(|p| hausdorff(p, gt)),
            rmse: pred.map(|p| rmse_with(p, gt, opts.rmse_samples)),
        }
    })?;

    let failures = per_record.iter().filter(|s| s.dfd.is_none()).count();
    let compliant = per_record.iter().filter(|s| s.compliant).count();
    let metric = |get: fn(&TrajectoryScore) -> Option<f64>| {
        mean(per_record.iter().filter_map(|s| match opts.failure_policy {
            FailurePolicy::Exclude => get(s),
            FailurePolicy::Penalize => Some(get(s).unwrap_or(FAILURE_DISTANCE)),
        }))
    };
    let mean_dfd = metric(|s| s.dfd);
    let mean_hd = metric(|s| s.hd);
    let mean_rmse = metric(|s| s.rmse);
    let avg = match (mean_dfd, mean_hd, mean_rmse) {
        (Some(a), Some(b), Some(c)) => Some((a + b + c) / 3.0),
        _ => None,
    };
    Ok(TrajectoryMetrics {
        records: pool.len(),
        parse_failures: failures,
        format_compliance: compliant as f64 / pool.len() as f64,
        mean_dfd,
        mean_hd,
        mean_rmse,
        avg,
        per_record,
    })
}

/// Evaluates the selected task pools. With [`TaskSelection::Both`], a pool
/// with no records is omitted; an explicitly selected empty pool is an error.
pub fn evaluate(
    model: &str,
    records: &[EvalRecord],
    selection: TaskSelection,
    opts: &EvalOptions,
) -> Result<MetricsReport> {
    let has = |t: TaskKind| records.iter().any(|r| r.task == t);
    let (affordance, trajectory) = match selection {
        TaskSelection::Affordance => (Some(evaluate_affordance(records, opts)?), None),
        TaskSelection::Trajectory => (None, Some(evaluate_trajectory(records, opts)?)),
        TaskSelection::Both => {
            if records.is_empty() {
                return Err(Error::EmptyPool("affordance or trajectory"));
            }
            let a = has(TaskKind::Affordance)
                .then(|| evaluate_affordance(records, opts))
                .transpose()?;
            let t = has(TaskKind::Trajectory)
                .then(|| evaluate_trajectory(records, opts))
                .transpose()?;
            (a, t)
        }
    };
    let record_count =
        affordance.as_ref().map_or(0, |a| a.records) + trajectory.as_ref().map_or(0, |t| t.records);
    Ok(MetricsReport {
        model: model.to_string(),
        record_count,
        iou_aggregation: "mean over records, percent".into(),
        rmse_alignment: format!("arc-length resampling to {} points", opts.rmse_samples),
        failure_policy: opts.failure_policy,
        affordance,
        trajectory,
    })
}
