//! Independent reference implementations and generators shared by the
//! integration tests. Nothing here calls the library's metric code.

#![allow(dead_code)]

use rand::Rng;
use serde_json::json;
use vreward::geometry::{BBox, Trajectory};
use vreward::parser::Answer;

pub type Pts = Vec<(f64, f64)>;

pub fn traj(p: &Pts) -> Trajectory<f64> {
    Trajectory::from_pairs(p.iter().copied()).unwrap()
}

pub fn pts(t: &Trajectory<f64>) -> Pts {
    t.points().iter().map(|p| (p.x, p.y)).collect()
}

pub fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Walks every monotone coupling from (0,0) to (n-1,m-1) with steps
/// (1,0), (0,1), (1,1); returns (min over paths of max cost, min over paths of
/// summed cost).
pub fn enumerate_couplings(p: &Pts, q: &Pts) -> (f64, f64) {
    fn walk(p: &Pts, q: &Pts, i: usize, j: usize, mx: f64, sum: f64, best: &mut (f64, f64)) {
        let c = euclid(p[i], q[j]);
        let (mx, sum) = (mx.max(c), sum + c);
        if i + 1 == p.len() && j + 1 == q.len() {
            best.0 = best.0.min(mx);
            best.1 = best.1.min(sum);
            return;
        }
        if i + 1 < p.len() {
            walk(p, q, i + 1, j, mx, sum, best);
        }
        if j + 1 < q.len() {
            walk(p, q, i, j + 1, mx, sum, best);
        }
        if i + 1 < p.len() && j + 1 < q.len() {
            walk(p, q, i + 1, j + 1, mx, sum, best);
        }
    }
    let mut best = (f64::INFINITY, f64::INFINITY);
    walk(p, q, 0, 0, 0.0, 0.0, &mut best);
    best
}

pub fn oracle_frechet(p: &Pts, q: &Pts) -> f64 {
    enumerate_couplings(p, q).0
}

pub fn oracle_dtw(p: &Pts, q: &Pts) -> f64 {
    enumerate_couplings(p, q).1
}

pub fn oracle_hausdorff(p: &Pts, q: &Pts) -> f64 {
    let directed = |a: &Pts, b: &Pts| {
        a.iter()
            .map(|&u| {
                b.iter()
                    .map(|&v| euclid(u, v))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(p, q).max(directed(q, p))
}

pub fn oracle_iou(a: [f64; 4], b: [f64; 4]) -> f64 {
    let norm = |r: [f64; 4]| {
        [
            r[0].min(r[2]),
            r[1].min(r[3]),
            r[0].max(r[2]),
            r[1].max(r[3]),
        ]
    };
    let (a, b) = (norm(a), norm(b));
    let area = |r: [f64; 4]| (r[2] - r[0]) * (r[3] - r[1]);
    let w = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let h = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = w * h;
    let union = area(a) + area(b) - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// Equal arc-length resampling by linear search over segments.
pub fn oracle_resample(p: &Pts, k: usize) -> Pts {
    let lengths: Vec<f64> = p.windows(2).map(|w| euclid(w[0], w[1])).collect();
    let total: f64 = lengths.iter().sum();
    if total == 0.0 {
        return vec![p[0]; k];
    }
    (0..k)
        .map(|i| {
            if i == 0 {
                return p[0];
            }
            if i == k - 1 {
                return p[p.len() - 1];
            }
            let mut target = total * i as f64 / (k - 1) as f64;
            for (s, &len) in lengths.iter().enumerate() {
                if target <= len || s == lengths.len() - 1 {
                    let t = if len > 0.0 {
                        (target / len).clamp(0.0, 1.0)
                    } else {
                        1.0
                    };
                    let (a, b) = (p[s], p[s + 1]);
                    return (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
                }
                target -= len;
            }
            unreachable!()
        })
        .collect()
}

pub fn oracle_rmse(p: &Pts, q: &Pts, k: usize) -> f64 {
    let (a, b) = (oracle_resample(p, k), oracle_resample(q, k));
    let sum: f64 = a.iter().zip(&b).map(|(&u, &v)| euclid(u, v).powi(2)).sum();
    (sum / k as f64).sqrt()
}

/// Two-pass population z-scores with the zero-variance floor.
pub fn oracle_advantages(r: &[f64], eps: f64) -> Vec<f64> {
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let var = r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < eps {
        return vec![0.0; r.len()];
    }
    r.iter().map(|v| (v - mean) / std).collect()
}

pub fn random_pts<R: Rng>(rng: &mut R, min_len: usize, max_len: usize) -> Pts {
    let n = rng.random_range(min_len..=max_len);
    (0..n)
        .map(|_| (rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0)))
        .collect()
}

/// Box with positive area inside the coordinate range.
pub fn random_box<R: Rng>(rng: &mut R) -> [f64; 4] {
    let x1 = rng.random_range(0.0..990.0);
    let y1 = rng.random_range(0.0..990.0);
    let x2 = rng.random_range(x1 + 1.0..1000.0);
    let y2 = rng.random_range(y1 + 1.0..1000.0);
    [x1, y1, x2, y2]
}

pub fn bbox(b: [f64; 4]) -> BBox<f64> {
    BBox::new(b[0], b[1], b[2], b[3]).unwrap()
}

pub fn gt_json(answer: &Answer<f64>) -> serde_json::Value {
    match answer {
        Answer::Affordance(b) => json!(b.corners()),
        Answer::Trajectory(t) => json!(pts(t).iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>()),
    }
}

/// One JSONL line in the evaluation input schema.
pub fn record_line(id: &str, prediction: &str, gt: &Answer<f64>) -> String {
    json!({
        "id": id,
        "task": gt.kind(),
        "instruction": "reach the target",
        "prediction": prediction,
        "gt": gt_json(gt),
    })
    .to_string()
}

pub mod strategies {
    use super::Pts;
    use proptest::prelude::*;

    pub fn coord() -> impl Strategy<Value = f64> {
        0.0..1000.0f64
    }

    pub fn points(min: usize, max: usize) -> impl Strategy<Value = Pts> {
        prop::collection::vec((coord(), coord()), min..=max)
    }

    pub fn boxes() -> impl Strategy<Value = [f64; 4]> {
        (0.0..990.0f64, 0.0..990.0f64, 1.0..500.0f64, 1.0..500.0f64)
            .prop_map(|(x, y, w, h)| [x, y, (x + w).min(999.0), (y + h).min(999.0)])
    }
}
