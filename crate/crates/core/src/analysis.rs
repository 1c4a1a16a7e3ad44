//! Error metrics, rate-distortion sweeps and raw storage accounting.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::approximation::{build_approximation, Approximation, ApproximationSpec};
use crate::codec::{CodecConfig, Method};
use crate::container::{encode_png_gray16, ImageFormat};
use crate::error::{Error, Result};
use crate::geometry::{depth_stats, subtract, DepthMap};
use crate::pipeline::{decode_from_path, encode_to_path};
use crate::scalar::Scalar;

pub const DEFAULT_OUTLIER_THRESHOLD_MM: f64 = 10.0;
pub const DEFAULT_PERIODS: [f64; 10] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub rms_mm: f64,
    pub max_abs_mm: f64,
    /// Jointly valid pixels that entered the RMS.
    pub compared: usize,
    pub outliers_excluded: usize,
    pub outlier_threshold_mm: f64,
    /// `100 (1 - rms / range of reference)`.
    pub accuracy_pct: f64,
}

/// RMS difference over pixels valid in both maps, skipping pixels whose
/// absolute error exceeds `threshold_mm`.
pub fn rms_error<T: Scalar>(
    recovered: &DepthMap<T>,
    reference: &DepthMap<T>,
    threshold_mm: f64,
) -> Result<ErrorReport> {
    if recovered.dims() != reference.dims() {
        return Err(Error::dims(recovered.dims(), reference.dims()));
    }
    if !(threshold_mm > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "outlier threshold must be positive, got {threshold_mm}"
        )));
    }
    let (mut sum, mut worst, mut compared, mut excluded) = (0.0f64, 0.0f64, 0usize, 0usize);
    for (i, a) in recovered.valid_values() {
        if !reference.mask()[i] {
            continue;
        }
        let d = (a.as_f64() - reference.values()[i].as_f64()).abs();
        if d > threshold_mm {
            excluded += 1;
            continue;
        }
        sum += d * d;
        worst = worst.max(d);
        compared += 1;
    }
    if compared == 0 {
        return Err(Error::EmptyIntersection);
    }
    let rms = (sum / compared as f64).sqrt();
    let range = depth_stats(reference)?.range.as_f64();
    let accuracy_pct = if range > 0.0 {
        100.0 * (1.0 - rms / range)
    } else if rms == 0.0 {
        100.0
    } else {
        f64::NEG_INFINITY
    };
    Ok(ErrorReport {
        rms_mm: rms,
        max_abs_mm: worst,
        compared,
        outliers_excluded: excluded,
        outlier_threshold_mm: threshold_mm,
        accuracy_pct,
    })
}

/// Whether a sweep row stores the range-reduced residual or the input as is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Geometry {
    Reduced,
    Original,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Reduced => "reduced",
            Geometry::Original => "original",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: f64,
    pub method: Method,
    pub geometry: Geometry,
    pub image_format: ImageFormat,
    /// Total container bytes, thumbnail included.
    pub file_size_bytes: u64,
    pub rms_mm: f64,
    pub accuracy_pct: f64,
    pub outliers_excluded: usize,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub periods: Vec<f64>,
    pub methods: Vec<Method>,
    pub formats: Vec<ImageFormat>,
    pub threshold_mm: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            periods: DEFAULT_PERIODS.to_vec(),
            methods: vec![Method::Mwd],
            formats: vec![ImageFormat::Png],
            threshold_mm: DEFAULT_OUTLIER_THRESHOLD_MM,
        }
    }
}

/// Runs the full pipeline through files on disk for every combination of
/// method, format and `n`, once with `spec` and once with the identity
/// approximation as a baseline.
///
/// Rows are ordered by method, format, `n`, then reduced before original.
pub fn sweep<T: Scalar>(
    z: &DepthMap<T>,
    spec: &ApproximationSpec<T>,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    if cfg.periods.is_empty() || cfg.methods.is_empty() || cfg.formats.is_empty() {
        return Err(Error::InvalidConfig(
            "sweep needs at least one n, method and format".into(),
        ));
    }
    if let Some(bad) = cfg.periods.iter().find(|n| !(**n > 0.0) || !n.is_finite()) {
        return Err(Error::NonPositivePeriods(*bad));
    }
    let mut periods = cfg.periods.clone();
    periods.sort_by(f64::total_cmp);
    periods.dedup();
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let mut formats = cfg.formats.clone();
    formats.sort();
    formats.dedup();

    let baseline = ApproximationSpec::identity();
    let mut jobs = Vec::new();
    for &method in &methods {
        for &format in &formats {
            for &n in &periods {
                for geometry in [Geometry::Reduced, Geometry::Original] {
                    jobs.push((method, format, n, geometry));
                }
            }
        }
    }
    let dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
    jobs.par_iter()
        .enumerate()
        .map(|(k, &(method, format, n, geometry))| {
            let codec = CodecConfig::new(method, n, None)?;
            let used = match geometry {
                Geometry::Reduced => spec,
                Geometry::Original => &baseline,
            };
            let path = dir.path().join(format!("run{k}"));
            let (_, sizes) = encode_to_path(z, used, &codec, format, &path)?;
            let recovered: DepthMap<T> = decode_from_path(&path)?;
            let report = rms_error(&recovered, z, cfg.threshold_mm)?;
            Ok(SweepRow {
                n,
                method,
                geometry,
                image_format: format,
                file_size_bytes: sizes.total(),
                rms_mm: report.rms_mm,
                accuracy_pct: report.accuracy_pct,
                outliers_excluded: report.outliers_excluded,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let enc = |e: csv::Error| Error::Encode(format!("csv: {e}"));
    wtr.write_record([
        "n",
        "method",
        "geometry",
        "image_format",
        "jpeg_quality",
        "file_size_bytes",
        "rms_mm",
        "accuracy_pct",
        "outliers_excluded",
    ])
    .map_err(enc)?;
    for r in rows {
        wtr.write_record([
            format!("{}", r.n),
            r.method.to_string(),
            r.geometry.to_string(),
            r.image_format.name().to_string(),
            r.image_format
                .quality()
                .map(|q| q.to_string())
                .unwrap_or_default(),
            r.file_size_bytes.to_string(),
            format!("{}", r.rms_mm),
            format!("{}", r.accuracy_pct),
            r.outliers_excluded.to_string(),
        ])
        .map_err(enc)?;
    }
    wtr.flush().map_err(|e| Error::Encode(format!("csv: {e}")))
}

/// Row with the fewest periods whose RMS meets `target_rms_mm`; equal `n`
/// prefers the smaller file.
pub fn min_periods_for_target<'a, I>(rows: I, target_rms_mm: f64) -> Result<&'a SweepRow>
where
    I: IntoIterator<Item = &'a SweepRow>,
{
    rows.into_iter()
        .filter(|r| r.rms_mm <= target_rms_mm)
        .min_by(|a, b| {
            a.n.total_cmp(&b.n)
                .then(a.file_size_bytes.cmp(&b.file_size_bytes))
        })
        .ok_or(Error::TargetUnreachable(target_rms_mm))
}

/// Bits per pixel needed to store every step of `precision` across `range`.
pub fn bits_per_pixel(range: f64, precision: f64) -> Result<u32> {
    if !(precision > 0.0) || !precision.is_finite() {
        return Err(Error::NonPositivePrecision(precision));
    }
    if !(range >= 0.0) || !range.is_finite() {
        return Err(Error::NonPositiveRange(range));
    }
    let codes = range / precision + 1.0;
    Ok((codes.log2().ceil() as u32).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawSizeReport {
    pub pixels: u64,
    pub original_bits: u32,
    pub reduced_bits: u32,
    pub original_bytes: u64,
    /// Packed residual plus the serialized approximation.
    pub reduced_bytes: u64,
    pub overhead_bytes: u64,
    pub savings_pct: f64,
}

fn packed_bytes(bits: u32, pixels: u64) -> u64 {
    (u64::from(bits) * pixels).div_ceil(8)
}

pub fn raw_size_from_ranges(
    original_range: f64,
    reduced_range: f64,
    precision: f64,
    pixels: u64,
    overhead_bytes: u64,
) -> Result<RawSizeReport> {
    let original_bits = bits_per_pixel(original_range, precision)?;
    let reduced_bits = bits_per_pixel(reduced_range, precision)?;
    let original_bytes = packed_bytes(original_bits, pixels);
    let reduced_bytes = packed_bytes(reduced_bits, pixels) + overhead_bytes;
    let savings_pct = if original_bytes == 0 {
        0.0
    } else {
        100.0 * (original_bytes as f64 - reduced_bytes as f64) / original_bytes as f64
    };
    Ok(RawSizeReport {
        pixels,
        original_bits,
        reduced_bits,
        original_bytes,
        reduced_bytes,
        overhead_bytes,
        savings_pct,
    })
}

/// Serialized size of an approximation: the thumbnail PNG, or four
/// single-precision sphere parameters plus a 4x4 transform when one is set.
pub fn approximation_overhead<T: Scalar>(spec: &ApproximationSpec<T>) -> Result<u64> {
    Ok(match spec.approximation() {
        Approximation::Identity => 0,
        Approximation::Thumbnail(t) => {
            encode_png_gray16(t.width(), t.height(), t.samples())?.len() as u64
        }
        Approximation::Sphere(_) => {
            if spec.transform().is_identity() {
                16
            } else {
                16 + 64
            }
        }
    })
}

/// Raw packed storage of `z` against the residual left by `spec`.
pub fn raw_size_report<T: Scalar>(
    z: &DepthMap<T>,
    spec: &ApproximationSpec<T>,
    precision: f64,
) -> Result<RawSizeReport> {
    let (w, h) = z.dims();
    let approx = build_approximation(spec, w, h, z.grid())?;
    let residual = subtract(z, &approx)?;
    raw_size_from_ranges(
        depth_stats(z)?.range.as_f64(),
        depth_stats(&residual)?.range.as_f64(),
        precision,
        (w * h) as u64,
        approximation_overhead(spec)?,
    )
}
