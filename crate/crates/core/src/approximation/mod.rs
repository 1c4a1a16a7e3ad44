//! Low-overhead approximations of a depth map and their regeneration.
//!
//! An [`ApproximationSpec`] holds everything needed to rebuild the
//! approximation at decode time. Encoder and decoder both go through
//! [`build_approximation`], which is what makes the residual cancel exactly.

mod sphere;
mod thumbnail;
mod transform;

pub use sphere::{fit_sphere, rasterize_sphere, SphereParams};
pub use thumbnail::{block_mean_thumbnail, upsample_bicubic, Thumbnail};
pub use transform::{apply_transform, Transform4x4};

use crate::error::{Error, Result};
use crate::geometry::{DepthMap, Grid};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Approximation<T> {
    Identity,
    Thumbnail(Thumbnail<T>),
    Sphere(SphereParams<T>),
}

impl<T> Approximation<T> {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Approximation::Identity => "identity",
            Approximation::Thumbnail(_) => "thumbnail",
            Approximation::Sphere(_) => "sphere",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationSpec<T> {
    approx: Approximation<T>,
    transform: Transform4x4<T>,
}

impl<T: Scalar> ApproximationSpec<T> {
    /// Only sphere approximations carry a non-identity alignment transform;
    /// the other kinds are pixel-aligned by construction.
    pub fn new(approx: Approximation<T>, transform: Transform4x4<T>) -> Result<Self> {
        if !transform.is_identity() && !matches!(approx, Approximation::Sphere(_)) {
            return Err(Error::InvalidConfig(format!(
                "{} approximation requires an identity transform",
                approx.kind_name()
            )));
        }
        if transform.linear_determinant() == T::zero() {
            return Err(Error::SingularTransform);
        }
        Ok(ApproximationSpec { approx, transform })
    }

    pub fn identity() -> Self {
        ApproximationSpec {
            approx: Approximation::Identity,
            transform: Transform4x4::identity(),
        }
    }

    pub fn thumbnail(t: Thumbnail<T>) -> Self {
        ApproximationSpec {
            approx: Approximation::Thumbnail(t),
            transform: Transform4x4::identity(),
        }
    }

    pub fn sphere(s: SphereParams<T>, transform: Transform4x4<T>) -> Result<Self> {
        Self::new(Approximation::Sphere(s), transform)
    }

    pub fn approximation(&self) -> &Approximation<T> {
        &self.approx
    }

    pub fn transform(&self) -> &Transform4x4<T> {
        &self.transform
    }

    pub fn kind_name(&self) -> &'static str {
        self.approx.kind_name()
    }

    pub fn as_thumbnail(&self) -> Option<&Thumbnail<T>> {
        match &self.approx {
            Approximation::Thumbnail(t) => Some(t),
            _ => None,
        }
    }
}

/// Regenerates the pixel-aligned approximation described by `spec`.
///
/// Sphere specs move the center through the transform and scale the radius
/// by the cube root of the transform's volume change, then rasterize over
/// `grid` (unit pixel pitch when absent). Output values are rounded to single
/// precision, matching the storage precision of depth maps; a residual taken
/// against single-precision depths is then exact in double precision.
pub fn build_approximation<T: Scalar>(
    spec: &ApproximationSpec<T>,
    width: usize,
    height: usize,
    grid: Option<&Grid<T>>,
) -> Result<DepthMap<T>> {
    let raw = match &spec.approx {
        Approximation::Identity => DepthMap::filled(width, height, T::zero())?,
        Approximation::Thumbnail(t) => {
            if t.target() != (width, height) {
                return Err(Error::dims(t.target(), (width, height)));
            }
            upsample_bicubic(t)
        }
        Approximation::Sphere(s) => {
            let center = apply_transform(&[s.center()], &spec.transform)?[0];
            let gain = spec.transform.linear_determinant().abs().cbrt();
            let moved = SphereParams::new(center[0], center[1], center[2], s.radius * gain)?;
            let grid = grid.copied().unwrap_or_else(Grid::pixels);
            rasterize_sphere(&moved, &grid, width, height)?
        }
    };
    raw.map_valid(T::to_single).with_grid(grid.copied())
}
