use std::ops::Mul;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major 4x4 homogeneous transform with bottom row `(0, 0, 0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform4x4<T> {
    m: [T; 16],
}

impl<T: Scalar> Transform4x4<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Transform4x4 {
            m: [o, z, z, z, z, o, z, z, z, z, o, z, z, z, z, o],
        }
    }

    /// Validates the affine bottom row.
    pub fn from_row_major(m: [T; 16]) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "transform has non-finite entries".into(),
            ));
        }
        let (o, z) = (T::one(), T::zero());
        if m[12] != z || m[13] != z || m[14] != z || m[15] != o {
            return Err(Error::InvalidConfig(
                "transform bottom row must be (0, 0, 0, 1)".into(),
            ));
        }
        Ok(Transform4x4 { m })
    }

    pub fn translation(t: [T; 3]) -> Self {
        let mut out = Self::identity();
        out.m[3] = t[0];
        out.m[7] = t[1];
        out.m[11] = t[2];
        out
    }

    /// Rotation by `angle` radians about `axis` (Rodrigues form). A zero
    /// angle yields the identity regardless of the axis.
    pub fn rotation(axis: [T; 3], angle: T) -> Result<Self> {
        if angle == T::zero() {
            return Ok(Self::identity());
        }
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidConfig(
                "rotation axis must be non-zero".into(),
            ));
        }
        let (x, y, z) = (axis[0] / norm, axis[1] / norm, axis[2] / norm);
        let (s, c) = angle.sin_cos();
        let k = T::one() - c;
        let mut out = Self::identity();
        out.m[0] = c + x * x * k;
        out.m[1] = x * y * k - z * s;
        out.m[2] = x * z * k + y * s;
        out.m[4] = y * x * k + z * s;
        out.m[5] = c + y * y * k;
        out.m[6] = y * z * k - x * s;
        out.m[8] = z * x * k - y * s;
        out.m[9] = z * y * k + x * s;
        out.m[10] = c + z * z * k;
        Ok(out)
    }

    pub fn scale(s: [T; 3]) -> Result<Self> {
        if s.iter().any(|&v| v == T::zero()) {
            return Err(Error::ZeroScale);
        }
        let mut out = Self::identity();
        out.m[0] = s[0];
        out.m[5] = s[1];
        out.m[10] = s[2];
        Ok(out)
    }

    /// `Translation * Rotation * Scale`: points are scaled first, then
    /// rotated, then translated.
    pub fn compose(translation: [T; 3], axis: [T; 3], angle: T, scale: [T; 3]) -> Result<Self> {
        let s = Self::scale(scale)?;
        let r = Self::rotation(axis, angle)?;
        Ok(Self::translation(translation) * r * s)
    }

    pub fn entries(&self) -> &[T; 16] {
        &self.m
    }

    pub fn at(&self, row: usize, col: usize) -> T {
        self.m[row * 4 + col]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Determinant of the upper-left 3x3 block; equals the full determinant
    /// for an affine transform.
    pub fn linear_determinant(&self) -> T {
        let a = |r: usize, c: usize| self.m[r * 4 + c];
        a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
    }

    pub fn apply_point(&self, p: [T; 3]) -> [T; 3] {
        let row = |r: usize| {
            self.m[r * 4] * p[0]
                + self.m[r * 4 + 1] * p[1]
                + self.m[r * 4 + 2] * p[2]
                + self.m[r * 4 + 3]
        };
        let w = row(3);
        [row(0) / w, row(1) / w, row(2) / w]
    }
}

impl<T: Scalar> Mul for Transform4x4<T> {
    type Output = Transform4x4<T>;

    fn mul(self, rhs: Self) -> Self {
        let mut m = [T::zero(); 16];
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = T::zero();
                for k in 0..4 {
                    acc += self.m[r * 4 + k] * rhs.m[k * 4 + c];
                }
                m[r * 4 + c] = acc;
            }
        }
        Transform4x4 { m }
    }
}

/// Multiplies every homogeneous point by `t`.
pub fn apply_transform<T: Scalar>(points: &[[T; 3]], t: &Transform4x4<T>) -> Result<Vec<[T; 3]>> {
    let det = t.linear_determinant();
    if det == T::zero() || !det.is_finite() {
        return Err(Error::SingularTransform);
    }
    Ok(points.iter().map(|&p| t.apply_point(p)).collect())
}
