//! Depth range reduction for image-based depth-map compression.
//!
//! A depth map is approximated by a compact model (a block-mean thumbnail or
//! a sphere), the approximation is subtracted to shrink the depth range, and
//! the residual is encoded into an 8-bit RGB image with a sinusoidal
//! phase-shifting codec. Decoding reverses each step.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below name the common instantiations.

// Negated float comparisons are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod approximation;
pub mod codec;
pub mod container;
pub mod error;
pub mod geometry;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type DepthMap32 = geometry::DepthMap<f32>;
pub type DepthMap64 = geometry::DepthMap<f64>;
pub type Thumbnail64 = approximation::Thumbnail<f64>;
pub type ApproximationSpec64 = approximation::ApproximationSpec<f64>;
pub type Transform64 = approximation::Transform4x4<f64>;
pub type SphereParams64 = approximation::SphereParams<f64>;
