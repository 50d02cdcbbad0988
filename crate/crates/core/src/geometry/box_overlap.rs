use super::BBox;
use crate::scalar::Scalar;

/// Intersection-over-union of two boxes; 0 when the union has no area.
pub fn iou<S: Scalar>(a: &BBox<S>, b: &BBox<S>) -> S {
    let iw = (a.x2().min(b.x2()) - a.x1().max(b.x1())).max(S::zero());
    let ih = (a.y2().min(b.y2()) - a.y1().max(b.y1())).max(S::zero());
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= S::zero() {
        return S::zero();
    }
    (inter / union).min(S::one())
}
