//! Geometric primitives over normalized image coordinates.
//!
//! Coordinates live in `[0, 1000)` with the origin at the top-left corner of
//! the image. Every distance uses the Euclidean point metric.

mod box_overlap;
mod dtw;
mod frechet;
mod hausdorff;
mod normalize;
mod resample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use box_overlap::iou;
pub use dtw::dtw;
pub use frechet::discrete_frechet;
pub use hausdorff::{directed_hausdorff, hausdorff};
pub(crate) use normalize::in_coord_range;
pub use normalize::{normalize_coords, COORD_RANGE};
pub use resample::{resample, rmse, rmse_with, DEFAULT_RMSE_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point2<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    /// Euclidean distance, computed as the square root of
    /// [`Point2::distance_squared`] so that every metric shares one rounding.
    pub fn distance(&self, other: &Self) -> S {
        self.distance_squared(other).sqrt()
    }

    pub fn distance_squared(&self, other: &Self) -> S {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn translate(&self, dx: S, dy: S) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub(crate) fn lerp(&self, other: &Self, t: S) -> Self {
        Self::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl<S> From<(S, S)> for Point2<S> {
    fn from((x, y): (S, S)) -> Self {
        Self { x, y }
    }
}

/// Ordered, non-empty sequence of waypoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2<S>>", into = "Vec<Point2<S>>")]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct Trajectory<S> {
    points: Vec<Point2<S>>,
}

impl<S: Scalar> Trajectory<S> {
    pub fn new(points: Vec<Point2<S>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if !points.iter().all(Point2::is_finite) {
            return Err(Error::NonFiniteCoordinate("trajectory"));
        }
        Ok(Self { points })
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
    {
        Self::new(pairs.into_iter().map(Point2::from).collect())
    }

    pub fn points(&self) -> &[Point2<S>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> &Point2<S> {
        &self.points[0]
    }

    pub fn last(&self) -> &Point2<S> {
        &self.points[self.points.len() - 1]
    }

    pub fn translate(&self, dx: S, dy: S) -> Self {
        Self {
            points: self.points.iter().map(|p| p.translate(dx, dy)).collect(),
        }
    }

    /// Total length of the piecewise-linear path.
    pub fn arc_length(&self) -> S {
        self.points
            .windows(2)
            .map(|w| w[0].distance(&w[1]))
            .fold(S::zero(), |acc, d| acc + d)
    }

    pub fn into_points(self) -> Vec<Point2<S>> {
        self.points
    }
}

impl<S: Scalar> TryFrom<Vec<Point2<S>>> for Trajectory<S> {
    type Error = Error;

    fn try_from(points: Vec<Point2<S>>) -> Result<Self> {
        Self::new(points)
    }
}

impl<S> From<Trajectory<S>> for Vec<Point2<S>> {
    fn from(t: Trajectory<S>) -> Self {
        t.points
    }
}

/// Axis-aligned box with `x1 <= x2` and `y1 <= y2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[S; 4]", into = "[S; 4]")]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct BBox<S> {
    x1: S,
    y1: S,
    x2: S,
    y2: S,
}

impl<S: Scalar> BBox<S> {
    /// Builds a box from two corners in any order; inverted corners are swapped.
    pub fn new(x1: S, y1: S, x2: S, y2: S) -> Result<Self> {
        if ![x1, y1, x2, y2].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteCoordinate("box"));
        }
        Ok(Self {
            x1: x1.min(x2),
            y1: y1.min(y2),
            x2: x1.max(x2),
            y2: y1.max(y2),
        })
    }

    pub fn x1(&self) -> S {
        self.x1
    }
    pub fn y1(&self) -> S {
        self.y1
    }
    pub fn x2(&self) -> S {
        self.x2
    }
    pub fn y2(&self) -> S {
        self.y2
    }

    pub fn corners(&self) -> [S; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn width(&self) -> S {
        self.x2 - self.x1
    }

    pub fn height(&self) -> S {
        self.y2 - self.y1
    }

    pub fn area(&self) -> S {
        self.width() * self.height()
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.area() > S::zero())
    }
}

impl<S: Scalar> TryFrom<[S; 4]> for BBox<S> {
    type Error = Error;

    fn try_from([x1, y1, x2, y2]: [S; 4]) -> Result<Self> {
        Self::new(x1, y1, x2, y2)
    }
}

impl<S: Scalar> From<BBox<S>> for [S; 4] {
    fn from(b: BBox<S>) -> Self {
        b.corners()
    }
}

/// Euclidean distance between the final points of two trajectories.
pub fn endpoint_distance<S: Scalar>(pred: &Trajectory<S>, gt: &Trajectory<S>) -> S {
    pred.last().distance(gt.last())
}
