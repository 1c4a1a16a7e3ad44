//! Sinusoidal depth encoders.
//!
//! Both codecs write a fringe pair `(½ + ½ sin θ, ½ + ½ cos θ)` into the red
//! and green channels and an auxiliary channel into blue:
//!
//! * [`Method::Mwd`] puts the normalized depth `(z - z_min) / range` in blue
//!   and uses the absolute depth for the fringe phase, `θ = 2π z / P`.
//! * [`Method::Dd`] puts a quantized stair (the period index) in blue and
//!   measures the fringe phase from `z_min`.
//!
//! `P = range / n` is the fringe width. The pixel `(0, 0, 0)` marks invalid
//! depth; no valid pixel can produce it because sine and cosine cannot both
//! be -1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{depth_stats, DepthMap};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Mwd,
    Dd,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mwd => "MWD",
            Method::Dd => "DD",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mwd" => Ok(Method::Mwd),
            "dd" => Ok(Method::Dd),
            other => Err(Error::InvalidConfig(format!(
                "unknown codec method {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodecConfig {
    method: Method,
    n: f64,
    stair_levels: u32,
}

impl CodecConfig {
    pub fn mwd(n: f64) -> Result<Self> {
        Self::new(Method::Mwd, n, None)
    }

    pub fn dd(n: f64) -> Result<Self> {
        Self::new(Method::Dd, n, None)
    }

    /// `stair_levels` defaults to `ceil(n)`, the fewest levels that index
    /// every period; it is ignored by MWD.
    pub fn new(method: Method, n: f64, stair_levels: Option<u32>) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NonPositivePeriods(n));
        }
        let needed = n.ceil().max(1.0);
        if needed > 255.0 {
            return Err(Error::InvalidConfig(format!(
                "at most 255 periods fit an 8-bit auxiliary channel, got {n}"
            )));
        }
        let needed = needed as u32;
        let stair_levels = match (method, stair_levels) {
            (Method::Mwd, _) => needed,
            (Method::Dd, None) => needed,
            (Method::Dd, Some(levels)) if levels >= needed && levels <= 255 => levels,
            (Method::Dd, Some(levels)) => {
                return Err(Error::InvalidConfig(format!(
                    "stair levels must lie in [{needed}, 255] for n = {n}, got {levels}"
                )))
            }
        };
        Ok(CodecConfig {
            method,
            n,
            stair_levels,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn periods(&self) -> f64 {
        self.n
    }

    pub fn stair_levels(&self) -> u32 {
        self.stair_levels
    }
}

/// Three 8-bit channel planes of equal size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedImage {
    pub width: usize,
    pub height: usize,
    pub r: Vec<u8>,
    pub g: Vec<u8>,
    pub b: Vec<u8>,
}

impl EncodedImage {
    pub fn from_interleaved(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::Decode(format!(
                "expected {} RGB bytes for {width}x{height}, got {}",
                width * height * 3,
                rgb.len()
            )));
        }
        let mut img = EncodedImage {
            width,
            height,
            r: Vec::with_capacity(width * height),
            g: Vec::with_capacity(width * height),
            b: Vec::with_capacity(width * height),
        };
        for px in rgb.chunks_exact(3) {
            img.r.push(px[0]);
            img.g.push(px[1]);
            img.b.push(px[2]);
        }
        Ok(img)
    }

    pub fn interleaved(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.r.len() * 3);
        for i in 0..self.r.len() {
            out.extend_from_slice(&[self.r[i], self.g[i], self.b[i]]);
        }
        out
    }

    pub fn pixel(&self, col: usize, row: usize) -> (u8, u8, u8) {
        let i = row * self.width + col;
        (self.r[i], self.g[i], self.b[i])
    }
}

/// Encoder output: the image plus the minimum and range the decoder needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded<T> {
    pub image: EncodedImage,
    pub z_min: T,
    pub range: T,
}

pub fn fringe_width<T: Scalar>(range: T, n: T) -> Result<T> {
    if !(n > T::zero()) || !n.is_finite() {
        return Err(Error::NonPositivePeriods(n.as_f64()));
    }
    if !(range > T::zero()) || !range.is_finite() {
        return Err(Error::NonPositiveRange(range.as_f64()));
    }
    Ok(range / n)
}

/// `round(255 * clamp(v, 0, 1))`, halves rounding away from zero.
pub fn quantize<T: Scalar>(v: T) -> u8 {
    let v = v.max(T::zero()).min(T::one());
    (T::lit(255.0) * v).round().to_u8().unwrap_or(0)
}

fn tau<T: Scalar>() -> T {
    T::PI() + T::PI()
}

/// Unquantized MWD channel intensities for one depth value.
pub fn mwd_intensities<T: Scalar>(z: T, z_min: T, range: T, p: T) -> [T; 3] {
    let half = T::lit(0.5);
    let theta = tau::<T>() * z / p;
    [
        half + half * theta.sin(),
        half + half * theta.cos(),
        (z - z_min) / range,
    ]
}

/// Wrapped phase in `[0, 2π)` recovered from the fringe pair.
fn wrapped_phase<T: Scalar>(r: u8, g: u8) -> T {
    let full = T::lit(255.0);
    let half = T::lit(0.5);
    let s = T::lit(r as f64) / full - half;
    let c = T::lit(g as f64) / full - half;
    let phi = s.atan2(c);
    if phi < T::zero() {
        phi + tau::<T>()
    } else {
        phi
    }
}

fn is_marker(img: &EncodedImage, i: usize) -> bool {
    img.r[i] == 0 && img.g[i] == 0 && img.b[i] == 0
}

fn range_of<T: Scalar>(z: &DepthMap<T>) -> Result<(T, T)> {
    let stats = depth_stats(z)?;
    if !(stats.range > T::zero()) {
        return Err(Error::ZeroRange);
    }
    Ok((stats.z_min, stats.range))
}

fn periods<T: Scalar>(cfg: &CodecConfig) -> T {
    T::lit(cfg.n)
}

pub fn mwd_encode<T: Scalar>(z: &DepthMap<T>, cfg: &CodecConfig) -> Result<Encoded<T>> {
    let (z_min, range) = range_of(z)?;
    let p = fringe_width(range, periods(cfg))?;
    let n = z.len();
    let mut image = EncodedImage {
        width: z.width(),
        height: z.height(),
        r: vec![0; n],
        g: vec![0; n],
        b: vec![0; n],
    };
    for (i, v) in z.valid_values() {
        let [r, g, b] = mwd_intensities(v, z_min, range, p);
        image.r[i] = quantize(r);
        image.g[i] = quantize(g);
        image.b[i] = quantize(b);
    }
    Ok(Encoded {
        image,
        z_min,
        range,
    })
}

fn decode_with<T: Scalar>(
    img: &EncodedImage,
    z_min: T,
    range: T,
    mut depth: impl FnMut(usize, T) -> T,
) -> Result<DepthMap<T>> {
    let n = img.width * img.height;
    let mut values = vec![T::zero(); n];
    let mut valid = vec![false; n];
    let z_max = z_min + range;
    for i in 0..n {
        if is_marker(img, i) {
            continue;
        }
        let phi = wrapped_phase::<T>(img.r[i], img.g[i]);
        values[i] = depth(i, phi).max(z_min).min(z_max);
        valid[i] = true;
    }
    DepthMap::new(img.width, img.height, values, valid, None)
}

fn check_decode_args<T: Scalar>(img: &EncodedImage, z_min: T, range: T) -> Result<()> {
    if !(range > T::zero()) || !range.is_finite() {
        return Err(Error::NonPositiveRange(range.as_f64()));
    }
    if !z_min.is_finite() {
        return Err(Error::InvalidConfig("z_min must be finite".into()));
    }
    let n = img.width * img.height;
    if img.r.len() != n || img.g.len() != n || img.b.len() != n {
        return Err(Error::Decode(
            "channel planes do not match image size".into(),
        ));
    }
    Ok(())
}

/// Inverts [`mwd_encode`]: the blue channel gives a coarse depth that picks
/// the period containing the fringe phase.
pub fn mwd_decode<T: Scalar>(
    img: &EncodedImage,
    z_min: T,
    range: T,
    cfg: &CodecConfig,
) -> Result<DepthMap<T>> {
    check_decode_args(img, z_min, range)?;
    let p = fringe_width(range, periods(cfg))?;
    let two_pi = tau::<T>();
    let full = T::lit(255.0);
    decode_with(img, z_min, range, |i, phi| {
        let coarse = z_min + T::lit(img.b[i] as f64) / full * range;
        let frac = phi / two_pi;
        let k = (coarse / p - frac).round();
        p * (frac + k)
    })
}

pub fn dd_encode<T: Scalar>(z: &DepthMap<T>, cfg: &CodecConfig) -> Result<Encoded<T>> {
    let (z_min, range) = range_of(z)?;
    let p = fringe_width(range, periods(cfg))?;
    let levels = T::lit(cfg.stair_levels as f64);
    let two_pi = tau::<T>();
    let half = T::lit(0.5);
    let n = z.len();
    let mut image = EncodedImage {
        width: z.width(),
        height: z.height(),
        r: vec![0; n],
        g: vec![0; n],
        b: vec![0; n],
    };
    for (i, v) in z.valid_values() {
        let w = (v - z_min) / p;
        let theta = two_pi * w;
        let r = quantize(half + half * theta.sin());
        let g = quantize(half + half * theta.cos());
        // Stair index taken against the phase the decoder will see, so the
        // stair edges coincide with the quantized phase wraps.
        let seen = wrapped_phase::<T>(r, g) / two_pi;
        let k = (w - seen).round().max(T::zero()).min(levels);
        image.r[i] = r;
        image.g[i] = g;
        image.b[i] = quantize(k / levels);
    }
    Ok(Encoded {
        image,
        z_min,
        range,
    })
}

/// Inverts [`dd_encode`]: the blue channel holds the period index directly.
pub fn dd_decode<T: Scalar>(
    img: &EncodedImage,
    z_min: T,
    range: T,
    cfg: &CodecConfig,
) -> Result<DepthMap<T>> {
    check_decode_args(img, z_min, range)?;
    let p = fringe_width(range, periods(cfg))?;
    let levels = T::lit(cfg.stair_levels as f64);
    let two_pi = tau::<T>();
    let full = T::lit(255.0);
    decode_with(img, z_min, range, |i, phi| {
        let k = (levels * T::lit(img.b[i] as f64) / full).round();
        z_min + p * (phi / two_pi + k)
    })
}

pub fn encode<T: Scalar>(z: &DepthMap<T>, cfg: &CodecConfig) -> Result<Encoded<T>> {
    match cfg.method {
        Method::Mwd => mwd_encode(z, cfg),
        Method::Dd => dd_encode(z, cfg),
    }
}

pub fn decode<T: Scalar>(
    img: &EncodedImage,
    z_min: T,
    range: T,
    cfg: &CodecConfig,
) -> Result<DepthMap<T>> {
    match cfg.method {
        Method::Mwd => mwd_decode(img, z_min, range, cfg),
        Method::Dd => dd_decode(img, z_min, range, cfg),
    }
}
