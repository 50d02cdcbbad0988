use super::Point2;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exclusive upper bound of the normalized coordinate range.
pub const COORD_RANGE: f64 = 1000.0;

const CLAMP_MARGIN: f64 = 1e-6;

/// Largest representable coordinate strictly below [`COORD_RANGE`].
pub(crate) fn coord_upper<S: Scalar>() -> S {
    let range = S::lit(COORD_RANGE);
    let candidate = S::lit(COORD_RANGE - CLAMP_MARGIN);
    if candidate < range {
        candidate
    } else {
        // f32 cannot resolve the margin at this magnitude.
        range * (S::one() - S::epsilon())
    }
}

pub(crate) fn in_coord_range<S: Scalar>(v: S) -> bool {
    v >= S::zero() && v < S::lit(COORD_RANGE)
}

/// Maps pixel coordinates onto `[0, 1000)`, clamping to `[0, 1000 - 1e-6]`.
pub fn normalize_coords<S: Scalar>(
    points: &[Point2<S>],
    width: S,
    height: S,
) -> Result<Vec<Point2<S>>> {
    if !(width > S::zero() && height > S::zero()) || !width.is_finite() || !height.is_finite() {
        return Err(Error::NonPositiveDimension {
            width: width.to_f64().unwrap_or(f64::NAN),
            height: height.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !points.iter().all(Point2::is_finite) {
        return Err(Error::NonFiniteCoordinate("pixel points"));
    }
    let range = S::lit(COORD_RANGE);
    let upper = coord_upper::<S>();
    let scale = |v: S, extent: S| (v / extent * range).max(S::zero()).min(upper);
    Ok(points
        .iter()
        .map(|p| Point2::new(scale(p.x, width), scale(p.y, height)))
        .collect())
}
