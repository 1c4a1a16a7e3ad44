use crate::error::{Error, Result};
use crate::geometry::{DepthMap, Grid};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams<T> {
    pub cx: T,
    pub cy: T,
    pub cz: T,
    pub radius: T,
}

impl<T: Scalar> SphereParams<T> {
    pub fn new(cx: T, cy: T, cz: T, radius: T) -> Result<Self> {
        let all_finite = [cx, cy, cz, radius].iter().all(|v| v.is_finite());
        if !all_finite || !(radius > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "sphere needs finite center and positive radius, got r = {radius}"
            )));
        }
        Ok(SphereParams { cx, cy, cz, radius })
    }

    pub fn center(&self) -> [T; 3] {
        [self.cx, self.cy, self.cz]
    }
}

/// Solves a 4x4 system by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes relative to the matrix scale.
fn solve4<T: Scalar>(mut a: [[T; 4]; 4], mut b: [T; 4]) -> Option<[T; 4]> {
    let scale = a.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
    if !(scale > T::zero()) {
        return None;
    }
    let tiny = scale * T::epsilon() * T::lit(64.0);
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if !(a[pivot][col].abs() > tiny) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, &v) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [T::zero(); 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Algebraic least-squares sphere fit.
///
/// Solves `|p|^2 = 2 c.p + d` for center `c` and `d = r^2 - |c|^2` through the
/// normal equations, after centering and scaling the points to unit RMS
/// spread.
pub fn fit_sphere<T: Scalar>(points: &[[T; 3]]) -> Result<SphereParams<T>> {
    if points.len() < 4 {
        return Err(Error::DegenerateInput(format!(
            "sphere fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    let n = T::lit(points.len() as f64);
    let mut mean = [T::zero(); 3];
    for p in points {
        for k in 0..3 {
            mean[k] += p[k];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut spread = T::zero();
    for p in points {
        for k in 0..3 {
            let d = p[k] - mean[k];
            spread += d * d;
        }
    }
    let spread = (spread / n).sqrt();
    if !(spread > T::zero()) || !spread.is_finite() {
        return Err(Error::DegenerateInput("points coincide".into()));
    }

    let two = T::lit(2.0);
    let mut ata = [[T::zero(); 4]; 4];
    let mut atb = [T::zero(); 4];
    for p in points {
        let q = [
            (p[0] - mean[0]) / spread,
            (p[1] - mean[1]) / spread,
            (p[2] - mean[2]) / spread,
        ];
        let row = [two * q[0], two * q[1], two * q[2], T::one()];
        let rhs = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
        for i in 0..4 {
            for j in 0..4 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * rhs;
        }
    }
    let sol = solve4(ata, atb)
        .ok_or_else(|| Error::DegenerateInput("points are coplanar or collinear".into()))?;
    let r2 = sol[3] + sol[0] * sol[0] + sol[1] * sol[1] + sol[2] * sol[2];
    if !(r2 > T::zero()) {
        return Err(Error::DegenerateInput(
            "fit produced a non-positive radius".into(),
        ));
    }
    SphereParams::new(
        mean[0] + sol[0] * spread,
        mean[1] + sol[1] * spread,
        mean[2] + sol[2] * spread,
        r2.sqrt() * spread,
    )
}

/// Renders the viewer-facing half of a sphere over a pixel grid. Pixels
/// outside the silhouette take the center depth `cz`, so every pixel is valid.
pub fn rasterize_sphere<T: Scalar>(
    s: &SphereParams<T>,
    grid: &Grid<T>,
    width: usize,
    height: usize,
) -> Result<DepthMap<T>> {
    let r2 = s.radius * s.radius;
    let mut values = Vec::with_capacity(width * height);
    for row in 0..height {
        let dy = grid.y(row) - s.cy;
        for col in 0..width {
            let dx = grid.x(col) - s.cx;
            let rho2 = dx * dx + dy * dy;
            values.push(if rho2 <= r2 {
                s.cz + (r2 - rho2).sqrt()
            } else {
                s.cz
            });
        }
    }
    DepthMap::new(
        width,
        height,
        values,
        vec![true; width * height],
        Some(*grid),
    )
}
