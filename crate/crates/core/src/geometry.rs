//! Depth maps, their statistics, and the range-reduction subtraction and
//! re-addition.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mapping from pixel indices to world x/y coordinates in millimeters.
///
/// Pixel `(col, row)` sits at `(origin_x + col * pitch_x, origin_y + row * pitch_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    pub origin_x: T,
    pub origin_y: T,
    pub pitch_x: T,
    pub pitch_y: T,
}

impl<T: Scalar> Grid<T> {
    /// Unit-pitch grid anchored at pixel (0, 0).
    pub fn pixels() -> Self {
        Grid {
            origin_x: T::zero(),
            origin_y: T::zero(),
            pitch_x: T::one(),
            pitch_y: T::one(),
        }
    }

    pub fn x(&self, col: usize) -> T {
        self.origin_x + T::lit(col as f64) * self.pitch_x
    }

    pub fn y(&self, row: usize) -> T {
        self.origin_y + T::lit(row as f64) * self.pitch_y
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.origin_x, self.origin_y, self.pitch_x, self.pitch_y]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.pitch_x <= T::zero() || self.pitch_y <= T::zero() {
            return Err(Error::InvalidDepthMap(format!(
                "grid pitch must be positive and finite, got ({}, {})",
                self.pitch_x, self.pitch_y
            )));
        }
        Ok(())
    }
}

/// A row-major grid of depth values in millimeters with a validity mask.
///
/// Values at invalid pixels carry no meaning and are never read by the
/// statistics or the codecs.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap<T> {
    width: usize,
    height: usize,
    values: Vec<T>,
    valid: Vec<bool>,
    grid: Option<Grid<T>>,
}

impl<T: Scalar> DepthMap<T> {
    pub fn new(
        width: usize,
        height: usize,
        values: Vec<T>,
        valid: Vec<bool>,
        grid: Option<Grid<T>>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDepthMap(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let len = width * height;
        if values.len() != len || valid.len() != len {
            return Err(Error::InvalidDepthMap(format!(
                "expected {len} values and mask entries, got {} and {}",
                values.len(),
                valid.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .zip(&valid)
            .position(|(v, &ok)| ok && !v.is_finite())
        {
            return Err(Error::InvalidDepthMap(format!(
                "non-finite value at valid pixel ({}, {})",
                i % width,
                i / width
            )));
        }
        if let Some(g) = &grid {
            g.validate()?;
        }
        Ok(DepthMap {
            width,
            height,
            values,
            valid,
            grid,
        })
    }

    /// Builds a map from raw values; NaN and infinities become invalid pixels.
    pub fn from_values(width: usize, height: usize, values: Vec<T>) -> Result<Self> {
        let valid = values.iter().map(|v| v.is_finite()).collect();
        Self::new(width, height, values, valid, None)
    }

    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        Self::from_values(width, height, vec![value; width * height])
    }

    pub fn with_grid(mut self, grid: Option<Grid<T>>) -> Result<Self> {
        if let Some(g) = &grid {
            g.validate()?;
        }
        self.grid = grid;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn grid(&self) -> Option<&Grid<T>> {
        self.grid.as_ref()
    }

    pub fn get(&self, col: usize, row: usize) -> Option<T> {
        let i = row * self.width + col;
        self.valid[i].then(|| self.values[i])
    }

    pub fn is_valid(&self, col: usize, row: usize) -> bool {
        self.valid[row * self.width + col]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Iterator over `(index, value)` of valid pixels.
    pub fn valid_values(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.values
            .iter()
            .zip(&self.valid)
            .enumerate()
            .filter_map(|(i, (&v, &ok))| ok.then_some((i, v)))
    }

    /// World-space points of every valid pixel, using the map's grid or unit
    /// pixel pitch when none is set.
    pub fn points(&self) -> Vec<[T; 3]> {
        let grid = self.grid.unwrap_or_else(Grid::pixels);
        self.valid_values()
            .map(|(i, z)| [grid.x(i % self.width), grid.y(i / self.width), z])
            .collect()
    }

    pub fn map_valid(&self, mut f: impl FnMut(T) -> T) -> Self {
        let values = self
            .values
            .iter()
            .zip(&self.valid)
            .map(|(&v, &ok)| if ok { f(v) } else { v })
            .collect();
        DepthMap {
            values,
            ..self.clone()
        }
    }

    /// Converts the element type. Values that do not fit become invalid.
    pub fn cast<U: Scalar>(&self) -> DepthMap<U> {
        let conv = |v: T| U::from_f64(v.as_f64()).unwrap_or_else(U::nan);
        let values: Vec<U> = self.values.iter().map(|&v| conv(v)).collect();
        let valid = values
            .iter()
            .zip(&self.valid)
            .map(|(v, &ok)| ok && v.is_finite())
            .collect();
        DepthMap {
            width: self.width,
            height: self.height,
            values,
            valid,
            grid: self.grid.map(|g| Grid {
                origin_x: conv(g.origin_x),
                origin_y: conv(g.origin_y),
                pitch_x: conv(g.pitch_x),
                pitch_y: conv(g.pitch_y),
            }),
        }
    }

    fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::dims(self.dims(), other.dims()));
        }
        Ok(())
    }
}

/// Extrema and range over the valid pixels of a depth map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthStats<T> {
    pub z_min: T,
    pub z_max: T,
    pub range: T,
    pub valid_count: usize,
}

pub fn depth_stats<T: Scalar>(z: &DepthMap<T>) -> Result<DepthStats<T>> {
    let mut it = z.valid_values().map(|(_, v)| v);
    let first = it.next().ok_or(Error::EmptyMask)?;
    let (mut lo, mut hi, mut count) = (first, first, 1usize);
    for v in it {
        lo = lo.min(v);
        hi = hi.max(v);
        count += 1;
    }
    Ok(DepthStats {
        z_min: lo,
        z_max: hi,
        range: hi - lo,
        valid_count: count,
    })
}

/// Residual `z - approx` at every valid pixel of `z`. The output keeps `z`'s
/// mask and grid; invalid pixels pass their raw value through unchanged.
pub fn subtract<T: Scalar>(z: &DepthMap<T>, approx: &DepthMap<T>) -> Result<DepthMap<T>> {
    z.check_same_dims(approx)?;
    let mut values = Vec::with_capacity(z.len());
    for (i, (&v, &ok)) in z.values.iter().zip(&z.valid).enumerate() {
        if !ok {
            values.push(v);
            continue;
        }
        if !approx.valid[i] {
            return Err(Error::MaskCoverage {
                x: i % z.width,
                y: i / z.width,
            });
        }
        values.push(v - approx.values[i]);
    }
    Ok(DepthMap {
        values,
        ..z.clone()
    })
}

/// Re-adds the approximation to a residual. Inverse of [`subtract`] for the
/// same `approx`; the output keeps the residual's mask and grid.
pub fn add<T: Scalar>(residual: &DepthMap<T>, approx: &DepthMap<T>) -> Result<DepthMap<T>> {
    residual.check_same_dims(approx)?;
    let mut values = Vec::with_capacity(residual.len());
    for (i, (&v, &ok)) in residual.values.iter().zip(&residual.valid).enumerate() {
        if !ok {
            values.push(v);
            continue;
        }
        if !approx.valid[i] {
            return Err(Error::MaskCoverage {
                x: i % residual.width,
                y: i / residual.width,
            });
        }
        values.push(v + approx.values[i]);
    }
    Ok(DepthMap {
        values,
        ..residual.clone()
    })
}

/// Synthetic hemisphere of the given radius, centered in a `size`x`size`
/// image whose width spans the sphere's diameter. Pixel `size/2` sits on the
/// axis, so the apex is exactly `radius`; pixels outside the disk are valid
/// at zero depth. Values are rounded to single precision like any stored
/// depth map.
pub fn make_hemisphere<T: Scalar>(size: usize, radius: T) -> Result<DepthMap<T>> {
    if size == 0 || !(radius > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "hemisphere needs size > 0 and radius > 0, got {size} and {radius}"
        )));
    }
    let pitch = T::lit(2.0) * radius / T::lit(size as f64);
    let half = T::lit((size / 2) as f64);
    let origin = -half * pitch;
    let grid = Grid {
        origin_x: origin,
        origin_y: origin,
        pitch_x: pitch,
        pitch_y: pitch,
    };
    let r2 = radius * radius;
    let mut values = Vec::with_capacity(size * size);
    for row in 0..size {
        let dy = grid.y(row);
        for col in 0..size {
            let dx = grid.x(col);
            values.push((r2 - dx * dx - dy * dy).max(T::zero()).sqrt().to_single());
        }
    }
    DepthMap::new(size, size, values, vec![true; size * size], Some(grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn masked(values: &[f64], valid: &[bool]) -> DepthMap<f64> {
        DepthMap::new(values.len(), 1, values.to_vec(), valid.to_vec(), None).unwrap()
    }

    #[test]
    fn stats_of_constant_map() {
        let z = DepthMap::filled(4, 3, 5.0f64).unwrap();
        let s = depth_stats(&z).unwrap();
        assert_eq!(
            (s.z_min, s.z_max, s.range, s.valid_count),
            (5.0, 5.0, 0.0, 12)
        );
    }

    #[test]
    fn stats_skip_masked_extremum() {
        let z = masked(&[0.0, 3.0, 100.0], &[true, true, false]);
        assert_eq!(depth_stats(&z).unwrap().range, 3.0);
    }

    #[test]
    fn stats_empty_mask() {
        let z = masked(&[1.0, 2.0], &[false, false]);
        assert!(matches!(depth_stats(&z), Err(Error::EmptyMask)));
    }

    #[test]
    fn nan_inputs_become_invalid() {
        let z = DepthMap::from_values(3, 1, vec![1.0f32, f32::NAN, f32::INFINITY]).unwrap();
        assert_eq!(z.mask(), &[true, false, false]);
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(DepthMap::<f64>::new(0, 1, vec![], vec![], None).is_err());
        assert!(DepthMap::new(2, 1, vec![1.0f64], vec![true], None).is_err());
        assert!(DepthMap::new(1, 1, vec![f64::NAN], vec![true], None).is_err());
        let bad = Grid {
            origin_x: 0.0,
            origin_y: 0.0,
            pitch_x: 0.0,
            pitch_y: 1.0,
        };
        assert!(DepthMap::new(1, 1, vec![1.0f64], vec![true], Some(bad)).is_err());
    }

    #[test]
    fn subtract_zero_is_identity() {
        let z = masked(&[1.5, -2.0, 7.0], &[true, true, true]);
        let zero = DepthMap::filled(3, 1, 0.0).unwrap();
        assert_eq!(subtract(&z, &zero).unwrap(), z);
    }

    #[test]
    fn add_to_zero_residual_gives_approx() {
        let a = masked(&[1.5, -2.0, 7.0], &[true, true, true]);
        let zero = DepthMap::filled(3, 1, 0.0).unwrap();
        assert_eq!(add(&zero, &a).unwrap().values(), a.values());
    }

    #[test]
    fn subtract_checks_dims_and_coverage() {
        let z = DepthMap::filled(3, 1, 1.0f64).unwrap();
        let small = DepthMap::filled(2, 1, 1.0f64).unwrap();
        assert!(matches!(
            subtract(&z, &small),
            Err(Error::DimensionMismatch { .. })
        ));
        let holes = masked(&[0.0, 0.0, 0.0], &[true, false, true]);
        assert!(matches!(
            subtract(&z, &holes),
            Err(Error::MaskCoverage { x: 1, y: 0 })
        ));
        assert!(matches!(
            add(&z, &small),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn subtract_keeps_mask_and_grid() {
        let z = masked(&[1.0, 9.0], &[true, false])
            .with_grid(Some(Grid::pixels()))
            .unwrap();
        let a = masked(&[0.5, 0.0], &[true, false]);
        let r = subtract(&z, &a).unwrap();
        assert_eq!(r.mask(), z.mask());
        assert_eq!(r.grid(), z.grid());
        assert_eq!(r.get(0, 0), Some(0.5));
    }

    #[test]
    fn hemisphere_fixture() {
        let z = make_hemisphere(512, 256.0f64).unwrap();
        assert_eq!(z.get(256, 256), Some(256.0));
        assert_eq!(z.get(0, 0), Some(0.0));
        assert_eq!(z.get(511, 511), Some(0.0));
        let s = depth_stats(&z).unwrap();
        assert_eq!(s.range, 256.0);
        assert_eq!(s.valid_count, 512 * 512);
    }

    #[test]
    fn hemisphere_rejects_bad_args() {
        assert!(make_hemisphere(0, 1.0f64).is_err());
        assert!(make_hemisphere(8, 0.0f64).is_err());
    }

    fn single_precision_depth() -> impl Strategy<Value = f64> {
        prop_oneof![
            Just(0.0f64),
            (1e-3f32..1e4f32).prop_map(f64::from),
            (-1e4f32..-1e-3f32).prop_map(f64::from),
        ]
    }

    proptest! {
        // Exact for single-precision operands in double arithmetic: the
        // difference of two f32 values within 2^29 of each other fits in 53 bits.
        #[test]
        fn subtract_add_bitwise_inverse(
            pairs in prop::collection::vec((single_precision_depth(), single_precision_depth()), 1..64)
        ) {
            let n = pairs.len();
            let z = DepthMap::from_values(n, 1, pairs.iter().map(|p| p.0).collect()).unwrap();
            let a = DepthMap::from_values(n, 1, pairs.iter().map(|p| p.1).collect()).unwrap();
            let back = add(&subtract(&z, &a).unwrap(), &a).unwrap();
            for (x, y) in back.values().iter().zip(z.values()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }

        #[test]
        fn stats_ignore_masked_values(
            vals in prop::collection::vec(-1e3f64..1e3, 2..40),
            junk in prop::collection::vec(prop::num::f64::ANY, 2..40),
        ) {
            let n = vals.len().min(junk.len());
            let valid: Vec<bool> = (0..n).map(|i| i % 3 != 1).collect();
            let base = DepthMap::new(n, 1, vals[..n].to_vec(), valid.clone(), None).unwrap();
            let noisy: Vec<f64> = (0..n).map(|i| if valid[i] { vals[i] } else { junk[i] }).collect();
            let dirty = DepthMap::new(n, 1, noisy, valid, None).unwrap();
            prop_assert_eq!(depth_stats(&base).unwrap(), depth_stats(&dirty).unwrap());
        }

        #[test]
        fn residual_range_triangle_bound(
            pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..64)
        ) {
            let n = pairs.len();
            let z = DepthMap::from_values(n, 1, pairs.iter().map(|p| p.0).collect()).unwrap();
            let a = DepthMap::from_values(n, 1, pairs.iter().map(|p| p.1).collect()).unwrap();
            let r = subtract(&z, &a).unwrap();
            let bound = depth_stats(&z).unwrap().range + depth_stats(&a).unwrap().range;
            prop_assert!(depth_stats(&r).unwrap().range <= bound * (1.0 + 1e-12));
        }
    }
}
