use super::Trajectory;
use crate::scalar::Scalar;

/// Directed Hausdorff distance `sup_{a in from} inf_{b in to} |a - b|`.
///
/// Early-break scan: the inner loop stops as soon as some `b` is closer to
/// `a` than the running maximum, since `a` can no longer raise it. Squared
/// distances are compared; one square root is taken at the end.
pub fn directed_hausdorff<S: Scalar>(from: &Trajectory<S>, to: &Trajectory<S>) -> S {
    let mut cmax = S::zero();
    for a in from.points() {
        let mut cmin = S::infinity();
        for b in to.points() {
            let d = a.distance_squared(b);
            if d < cmax {
                cmin = d;
                break;
            }
            cmin = cmin.min(d);
        }
        if cmin > cmax {
            cmax = cmin;
        }
    }
    cmax.sqrt()
}

/// Symmetric Hausdorff distance between the two waypoint sets.
pub fn hausdorff<S: Scalar>(p: &Trajectory<S>, q: &Trajectory<S>) -> S {
    directed_hausdorff(p, q).max(directed_hausdorff(q, p))
}
