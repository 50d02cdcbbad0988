use super::{Point2, Trajectory};
use crate::scalar::Scalar;

/// Point count both trajectories are resampled to before RMSE pairing.
pub const DEFAULT_RMSE_SAMPLES: usize = 50;

/// Resamples a path to `count` points at equal arc-length spacing.
///
/// The first and last input points are reproduced exactly. `count == 1`
/// yields the first point; a zero-length path yields `count` copies of its
/// only location. `count == 0` yields the first point as well, since a
/// trajectory cannot be empty.
pub fn resample<S: Scalar>(t: &Trajectory<S>, count: usize) -> Trajectory<S> {
    let pts = t.points();
    let first = *t.first();
    if count <= 1 {
        return Trajectory::new(vec![first]).expect("non-empty");
    }

    let mut cumulative = Vec::with_capacity(pts.len());
    cumulative.push(S::zero());
    for w in pts.windows(2) {
        let last = cumulative[cumulative.len() - 1];
        cumulative.push(last + w[0].distance(&w[1]));
    }
    let total = cumulative[cumulative.len() - 1];
    if !(total > S::zero()) {
        return Trajectory::new(vec![first; count]).expect("non-empty");
    }

    let steps = S::from_count(count - 1);
    let mut out = Vec::with_capacity(count);
    out.push(first);
    let mut seg = 0;
    for k in 1..count - 1 {
        let target = total * S::from_count(k) / steps;
        while seg + 2 < cumulative.len() && cumulative[seg + 1] < target {
            seg += 1;
        }
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let p = if seg_len > S::zero() {
            let t = ((target - cumulative[seg]) / seg_len)
                .max(S::zero())
                .min(S::one());
            pts[seg].lerp(&pts[seg + 1], t)
        } else {
            pts[seg + 1]
        };
        out.push(p);
    }
    out.push(*t.last());
    Trajectory::new(out).expect("non-empty")
}

/// Root-mean-square pointwise error after resampling both inputs to
/// [`DEFAULT_RMSE_SAMPLES`] points.
pub fn rmse<S: Scalar>(p: &Trajectory<S>, q: &Trajectory<S>) -> S {
    rmse_with(p, q, DEFAULT_RMSE_SAMPLES)
}

/// As [`rmse`] with an explicit resampling count.
pub fn rmse_with<S: Scalar>(p: &Trajectory<S>, q: &Trajectory<S>, samples: usize) -> S {
    let a = resample(p, samples);
    let b = resample(q, samples);
    let sum: S = a
        .points()
        .iter()
        .zip(b.points())
        .map(|(u, v): (&Point2<S>, &Point2<S>)| u.distance_squared(v))
        .sum();
    (sum / S::from_count(a.len())).sqrt()
}
