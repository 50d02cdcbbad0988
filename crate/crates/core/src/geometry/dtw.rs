use super::Trajectory;
use crate::scalar::Scalar;

/// Dynamic time warping: total accumulated Euclidean cost along the cheapest
/// monotone warping path, steps `{(1,0), (0,1), (1,1)}`, no window.
pub fn dtw<S: Scalar>(p: &Trajectory<S>, q: &Trajectory<S>) -> S {
    let (p, q) = (p.points(), q.points());
    let mut prev: Vec<S> = Vec::with_capacity(q.len());
    let mut curr: Vec<S> = vec![S::zero(); q.len()];

    let mut running = S::zero();
    for qj in q {
        running += p[0].distance(qj);
        prev.push(running);
    }

    for pi in &p[1..] {
        curr[0] = prev[0] + pi.distance(&q[0]);
        for j in 1..q.len() {
            let best = prev[j].min(prev[j - 1]).min(curr[j - 1]);
            curr[j] = best + pi.distance(&q[j]);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[q.len() - 1]
}
