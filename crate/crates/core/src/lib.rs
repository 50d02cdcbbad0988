//! Verifiable rewards for robotic-manipulation RL.
//!
//! - [`parser`]: `<think>`/`<answer>` format validation and payload decoding.
//! - [`geometry`]: IoU, discrete Fréchet, Hausdorff, RMSE, DTW and endpoint
//!   distance over normalized `[0, 1000)` coordinates.
//! - [`reward`]: affordance and trajectory rewards built from the above.
//! - [`group`]: group-relative advantages, KL estimates and the regularized
//!   objective.
//! - [`sim`]: a Gaussian toy policy trained with those rewards.
//! - [`harness`]: batch evaluation over JSONL records and report output.
//! - [`batch`]: batch-first entry points for foreign-language bindings.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the harness and simulator use.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod error;
pub mod geometry;
pub mod group;
pub mod harness;
pub mod parser;
pub mod reward;
mod scalar;
pub mod sim;

pub use error::{Error, Result, SchemaError};
pub use parser::{FormatVerdict, TaskKind, Violation};
pub use scalar::Scalar;

pub type Point2D = geometry::Point2<f64>;
pub type Trajectory = geometry::Trajectory<f64>;
pub type BBox = geometry::BBox<f64>;
pub type Answer = parser::Answer<f64>;
pub type ParsedAnswer = parser::ParsedAnswer<f64>;
pub type RewardConfig = reward::RewardConfig<f64>;
pub type RewardBreakdown = reward::RewardBreakdown<f64>;
pub type GroupScore = group::GroupScore<f64>;

pub type Point2DF32 = geometry::Point2<f32>;
pub type TrajectoryF32 = geometry::Trajectory<f32>;
pub type BBoxF32 = geometry::BBox<f32>;
pub type RewardConfigF32 = reward::RewardConfig<f32>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
