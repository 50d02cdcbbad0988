use super::Trajectory;
use crate::scalar::Scalar;

/// Discrete Fréchet distance (Eiter & Mannila coupling recurrence).
///
/// `ca[i][j] = max(d(p_i, q_j), min(ca[i-1][j], ca[i-1][j-1], ca[i][j-1]))`,
/// evaluated row by row with two buffers of length `|Q|`.
pub fn discrete_frechet<S: Scalar>(p: &Trajectory<S>, q: &Trajectory<S>) -> S {
    let (p, q) = (p.points(), q.points());
    let mut prev: Vec<S> = Vec::with_capacity(q.len());
    let mut curr: Vec<S> = vec![S::zero(); q.len()];

    // first row: only horizontal moves are possible
    let mut running = S::zero();
    for qj in q {
        running = running.max(p[0].distance(qj));
        prev.push(running);
    }

    for pi in &p[1..] {
        curr[0] = prev[0].max(pi.distance(&q[0]));
        for j in 1..q.len() {
            let reach = prev[j].min(prev[j - 1]).min(curr[j - 1]);
            curr[j] = reach.max(pi.distance(&q[j]));
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[q.len() - 1]
}
