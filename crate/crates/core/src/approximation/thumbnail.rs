use crate::error::{Error, Result};
use crate::geometry::DepthMap;
use crate::scalar::Scalar;

/// Block-mean summary of a depth map, quantized to 16 bits against its own
/// minimum and range.
#[derive(Debug, Clone, PartialEq)]
pub struct Thumbnail<T> {
    width: usize,
    height: usize,
    samples: Vec<u16>,
    z_min: T,
    z_range: T,
    block_w: usize,
    block_h: usize,
    target_w: usize,
    target_h: usize,
}

impl<T: Scalar> Thumbnail<T> {
    /// Assembles a thumbnail from stored parts; the cell grid dimensions are
    /// derived from the target size and block size.
    pub fn from_parts(
        samples: Vec<u16>,
        z_min: T,
        z_range: T,
        block: (usize, usize),
        target: (usize, usize),
    ) -> Result<Self> {
        let (block_w, block_h) = block;
        let (target_w, target_h) = target;
        if block_w == 0 || block_h == 0 || target_w == 0 || target_h == 0 {
            return Err(Error::InvalidConfig(
                "thumbnail block and target sizes must be positive".into(),
            ));
        }
        if !z_min.is_finite() || !z_range.is_finite() || z_range < T::zero() {
            return Err(Error::InvalidConfig(format!(
                "thumbnail scale must be finite with non-negative range, got min {z_min} range {z_range}"
            )));
        }
        let width = target_w.div_ceil(block_w);
        let height = target_h.div_ceil(block_h);
        if samples.len() != width * height {
            return Err(Error::InvalidConfig(format!(
                "thumbnail expects {}x{} samples, got {}",
                width,
                height,
                samples.len()
            )));
        }
        Ok(Thumbnail {
            width,
            height,
            samples,
            z_min,
            z_range,
            block_w,
            block_h,
            target_w,
            target_h,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn z_min(&self) -> T {
        self.z_min
    }

    pub fn z_range(&self) -> T {
        self.z_range
    }

    pub fn block(&self) -> (usize, usize) {
        (self.block_w, self.block_h)
    }

    pub fn target(&self) -> (usize, usize) {
        (self.target_w, self.target_h)
    }

    /// Height of one cell above `z_min`.
    pub fn offset(&self, sample: u16) -> T {
        if self.z_range == T::zero() {
            return T::zero();
        }
        T::lit(sample as f64) / T::lit(65535.0) * self.z_range
    }

    /// Metric depth of one cell. A zero range reproduces `z_min` exactly.
    pub fn dequantize(&self, sample: u16) -> T {
        self.z_min + self.offset(sample)
    }

    pub fn cell_values(&self) -> Vec<T> {
        self.samples.iter().map(|&s| self.dequantize(s)).collect()
    }
}

/// Averages each non-overlapping `block_w`x`block_h` block of valid pixels.
/// Partial blocks at the right and bottom edges average the pixels present;
/// blocks without valid pixels copy the nearest populated cell.
pub fn block_mean_thumbnail<T: Scalar>(
    z: &DepthMap<T>,
    block_w: usize,
    block_h: usize,
) -> Result<Thumbnail<T>> {
    if block_w == 0 || block_h == 0 {
        return Err(Error::InvalidConfig(
            "block sizes must be at least 1".into(),
        ));
    }
    let (w, h) = z.dims();
    let tw = w.div_ceil(block_w);
    let th = h.div_ceil(block_h);
    let mut sums = vec![T::zero(); tw * th];
    let mut counts = vec![0usize; tw * th];
    for (i, v) in z.valid_values() {
        let cell = (i / w / block_h) * tw + (i % w) / block_w;
        sums[cell] += v;
        counts[cell] += 1;
    }
    let populated: Vec<usize> = (0..tw * th).filter(|&c| counts[c] > 0).collect();
    if populated.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut means: Vec<Option<T>> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &n)| (n > 0).then(|| s / T::lit(n as f64)))
        .collect();
    for (cell, mean) in means.iter_mut().enumerate() {
        if mean.is_some() {
            continue;
        }
        let (cx, cy) = ((cell % tw) as isize, (cell / tw) as isize);
        let nearest = populated
            .iter()
            .min_by_key(|&&p| {
                let dx = (p % tw) as isize - cx;
                let dy = (p / tw) as isize - cy;
                dx * dx + dy * dy
            })
            .copied()
            .expect("populated is non-empty");
        *mean = Some(sums[nearest] / T::lit(counts[nearest] as f64));
    }
    let means: Vec<T> = means.into_iter().map(|m| m.expect("filled")).collect();

    let lo = means.iter().copied().fold(T::infinity(), T::min);
    let hi = means.iter().copied().fold(T::neg_infinity(), T::max);
    let range = hi - lo;
    let full = T::lit(65535.0);
    let samples = means
        .iter()
        .map(|&m| {
            if range == T::zero() {
                0
            } else {
                ((m - lo) / range * full)
                    .round()
                    .max(T::zero())
                    .min(full)
                    .to_u16()
                    .unwrap_or(0)
            }
        })
        .collect();
    Thumbnail::from_parts(samples, lo, range, (block_w, block_h), (w, h))
}

/// Catmull-Rom cubic convolution kernel (a = -0.5).
fn catmull_rom<T: Scalar>(x: T) -> T {
    let x = x.abs();
    let (one, two) = (T::one(), T::lit(2.0));
    if x <= one {
        (T::lit(1.5) * x - T::lit(2.5)) * x * x + one
    } else if x < two {
        ((T::lit(-0.5) * x + T::lit(2.5)) * x - T::lit(4.0)) * x + two
    } else {
        T::zero()
    }
}

struct Taps<T> {
    index: [usize; 4],
    weight: [T; 4],
}

/// Resampling taps mapping `dst` outputs onto `src` samples with the first
/// and last samples landing on the first and last outputs. Indices outside
/// the source clamp to its border.
fn axis_taps<T: Scalar>(src: usize, dst: usize) -> Vec<Taps<T>> {
    let last = src as isize - 1;
    (0..dst)
        .map(|o| {
            let (base, frac) = if dst > 1 && src > 1 {
                let num = o * (src - 1);
                let den = dst - 1;
                (num / den, T::lit((num % den) as f64) / T::lit(den as f64))
            } else {
                (0, T::zero())
            };
            let mut index = [0usize; 4];
            let mut weight = [T::zero(); 4];
            for k in 0..4 {
                let offset = k as isize - 1;
                index[k] = (base as isize + offset).clamp(0, last) as usize;
                weight[k] = catmull_rom(frac - T::lit(offset as f64));
            }
            Taps { index, weight }
        })
        .collect()
}

fn convolve<T: Scalar>(taps: &Taps<T>, sample: impl Fn(usize) -> T) -> T {
    let mut acc = T::zero();
    for k in 0..4 {
        acc += taps.weight[k] * sample(taps.index[k]);
    }
    acc
}

/// Dequantizes the thumbnail and resizes its cell grid to the target size
/// with separable Catmull-Rom interpolation. Offsets above `z_min` are
/// interpolated and `z_min` added last, so constant thumbnails come back
/// exact. Uses a fixed operation order, so identical thumbnails give
/// identical output bits.
pub fn upsample_bicubic<T: Scalar>(t: &Thumbnail<T>) -> DepthMap<T> {
    let cells: Vec<T> = t.samples.iter().map(|&s| t.offset(s)).collect();
    let (cw, ch) = (t.width, t.height);
    let (tw, th) = (t.target_w, t.target_h);
    let x_taps = axis_taps::<T>(cw, tw);
    let y_taps = axis_taps::<T>(ch, th);

    let mut rows = Vec::with_capacity(ch * tw);
    for cy in 0..ch {
        let line = &cells[cy * cw..(cy + 1) * cw];
        rows.extend(x_taps.iter().map(|tap| convolve(tap, |i| line[i])));
    }
    let mut out = Vec::with_capacity(tw * th);
    for tap in &y_taps {
        for x in 0..tw {
            out.push(t.z_min + convolve(tap, |i| rows[i * tw + x]));
        }
    }
    DepthMap::from_values(tw, th, out).expect("resampled thumbnail is well formed")
}
