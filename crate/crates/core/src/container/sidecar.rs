//! Plain-text `key=value` metadata stored next to the encoded image.

use std::collections::HashMap;

use crate::approximation::{
    Approximation, ApproximationSpec, SphereParams, Thumbnail, Transform4x4,
};
use crate::codec::{fringe_width, CodecConfig, Method};
use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::scalar::Scalar;

use super::image_io::ImageFormat;

pub const SIDECAR_VERSION: u32 = 1;

const KNOWN_KEYS: &[&str] = &[
    "version",
    "method",
    "n",
    "stair_levels",
    "p_mm",
    "zr_min_mm",
    "zr_range_mm",
    "image_format",
    "jpeg_quality",
    "image_file",
    "width",
    "height",
    "approx_kind",
    "thumb_width",
    "thumb_height",
    "thumb_block_w",
    "thumb_block_h",
    "thumb_z_min_mm",
    "thumb_z_range_mm",
    "thumb_file",
    "sphere_cx",
    "sphere_cy",
    "sphere_cz",
    "sphere_r",
    "transform",
    "grid_origin_x",
    "grid_origin_y",
    "grid_pitch_x",
    "grid_pitch_y",
];

/// Everything the decoder needs besides the image and thumbnail pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar<T> {
    pub codec: CodecConfig,
    /// Minimum of the encoded (residual) depth.
    pub z_min: T,
    /// Range of the encoded (residual) depth.
    pub range: T,
    pub image_format: ImageFormat,
    pub width: usize,
    pub height: usize,
    pub approx: ApproximationSpec<T>,
    pub grid: Option<Grid<T>>,
}

/// Thumbnail pixels as stored in their own image file.
pub type ThumbPixels = (usize, usize, Vec<u16>);

impl<T: Scalar> Sidecar<T> {
    /// Serializes with a fixed key order. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_text(&self, image_file: &str, thumb_file: Option<&str>) -> Result<String> {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        let f = |v: T| format!("{}", v.as_f64());
        put("version", SIDECAR_VERSION.to_string());
        put("method", self.codec.method().to_string());
        put("n", format!("{}", self.codec.periods()));
        if self.codec.method() == Method::Dd {
            put("stair_levels", self.codec.stair_levels().to_string());
        }
        let p = fringe_width(self.range.as_f64(), self.codec.periods())?;
        put("p_mm", format!("{p}"));
        put("zr_min_mm", f(self.z_min));
        put("zr_range_mm", f(self.range));
        put("image_format", self.image_format.name().to_string());
        if let Some(q) = self.image_format.quality() {
            put("jpeg_quality", q.to_string());
        }
        put("image_file", image_file.to_string());
        put("width", self.width.to_string());
        put("height", self.height.to_string());
        put("approx_kind", self.approx.kind_name().to_string());
        match self.approx.approximation() {
            Approximation::Identity => {}
            Approximation::Thumbnail(t) => {
                let file = thumb_file.ok_or_else(|| {
                    Error::InvalidConfig(
                        "thumbnail approximation needs a thumbnail file name".into(),
                    )
                })?;
                put("thumb_width", t.width().to_string());
                put("thumb_height", t.height().to_string());
                put("thumb_block_w", t.block().0.to_string());
                put("thumb_block_h", t.block().1.to_string());
                put("thumb_z_min_mm", f(t.z_min()));
                put("thumb_z_range_mm", f(t.z_range()));
                put("thumb_file", file.to_string());
            }
            Approximation::Sphere(s) => {
                put("sphere_cx", f(s.cx));
                put("sphere_cy", f(s.cy));
                put("sphere_cz", f(s.cz));
                put("sphere_r", f(s.radius));
            }
        }
        let entries: Vec<String> = self
            .approx
            .transform()
            .entries()
            .iter()
            .map(|&v| f(v))
            .collect();
        put("transform", entries.join(","));
        if let Some(g) = &self.grid {
            put("grid_origin_x", f(g.origin_x));
            put("grid_origin_y", f(g.origin_y));
            put("grid_pitch_x", f(g.pitch_x));
            put("grid_pitch_y", f(g.pitch_y));
        }
        Ok(out)
    }

    /// Parses sidecar text. `load_thumb` is called with the `thumb_file`
    /// value when the approximation is a thumbnail. Returns the sidecar and
    /// the image file name.
    pub fn parse(
        text: &str,
        load_thumb: impl FnOnce(&str) -> Result<ThumbPixels>,
    ) -> Result<(Self, String)> {
        let kv = KeyValues::parse(text)?;
        let version: u32 = kv.num("version")?;
        if version != SIDECAR_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: SIDECAR_VERSION,
            });
        }
        let method: Method = kv.get("method")?.1.parse()?;
        let n: f64 = kv.num("n")?;
        let stair_levels = match method {
            Method::Dd => Some(kv.num::<u32>("stair_levels")?),
            Method::Mwd => {
                kv.reject("stair_levels")?;
                None
            }
        };
        let codec = CodecConfig::new(method, n, stair_levels)?;
        let z_min: f64 = kv.num("zr_min_mm")?;
        let range: f64 = kv.num("zr_range_mm")?;
        let p: f64 = kv.num("p_mm")?;
        let expected_p = fringe_width(range, n)?;
        if ((p - expected_p) / expected_p).abs() > 1e-9 {
            return Err(kv.error(
                "p_mm",
                format!("p_mm {p} disagrees with range / n = {expected_p}"),
            ));
        }
        let image_format = match kv.get("image_format")?.1 {
            "png" => {
                kv.reject("jpeg_quality")?;
                ImageFormat::Png
            }
            "jpeg" => ImageFormat::jpeg(kv.num("jpeg_quality")?)?,
            other => {
                return Err(kv.error("image_format", format!("unknown image format {other:?}")))
            }
        };
        let image_file = kv.get("image_file")?.1.to_string();
        let width: usize = kv.num("width")?;
        let height: usize = kv.num("height")?;
        if width == 0 || height == 0 {
            return Err(kv.error("width", format!("bad image size {width}x{height}")));
        }

        let transform = {
            let (offset, raw) = kv.get("transform")?;
            let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
            if parts.len() != 16 {
                return Err(Error::parse(
                    offset,
                    format!("transform needs 16 entries, got {}", parts.len()),
                ));
            }
            let mut m = [T::zero(); 16];
            for (slot, part) in m.iter_mut().zip(&parts) {
                let v: f64 = part
                    .parse()
                    .map_err(|_| Error::parse(offset, format!("bad transform entry {part:?}")))?;
                *slot = T::lit(v);
            }
            Transform4x4::from_row_major(m)?
        };

        let thumb_keys = [
            "thumb_width",
            "thumb_height",
            "thumb_block_w",
            "thumb_block_h",
            "thumb_z_min_mm",
            "thumb_z_range_mm",
            "thumb_file",
        ];
        let sphere_keys = ["sphere_cx", "sphere_cy", "sphere_cz", "sphere_r"];
        let kind = kv.get("approx_kind")?.1;
        let approx = match kind {
            "identity" => {
                kv.reject_all(&thumb_keys)?;
                kv.reject_all(&sphere_keys)?;
                Approximation::Identity
            }
            "thumbnail" => {
                kv.reject_all(&sphere_keys)?;
                let tw: usize = kv.num("thumb_width")?;
                let th: usize = kv.num("thumb_height")?;
                let block = (kv.num("thumb_block_w")?, kv.num("thumb_block_h")?);
                let zmin: f64 = kv.num("thumb_z_min_mm")?;
                let zrange: f64 = kv.num("thumb_z_range_mm")?;
                let (pw, ph, samples) = load_thumb(kv.get("thumb_file")?.1)?;
                if (pw, ph) != (tw, th) {
                    return Err(Error::dims((tw, th), (pw, ph)));
                }
                let t = Thumbnail::from_parts(
                    samples,
                    T::lit(zmin),
                    T::lit(zrange),
                    block,
                    (width, height),
                )?;
                if (t.width(), t.height()) != (tw, th) {
                    return Err(Error::dims((tw, th), (t.width(), t.height())));
                }
                Approximation::Thumbnail(t)
            }
            "sphere" => {
                kv.reject_all(&thumb_keys)?;
                let s = SphereParams::new(
                    T::lit(kv.num("sphere_cx")?),
                    T::lit(kv.num("sphere_cy")?),
                    T::lit(kv.num("sphere_cz")?),
                    T::lit(kv.num("sphere_r")?),
                )?;
                Approximation::Sphere(s)
            }
            other => {
                return Err(kv.error("approx_kind", format!("unknown approximation {other:?}")))
            }
        };
        let approx = ApproximationSpec::new(approx, transform)?;

        let grid_keys = [
            "grid_origin_x",
            "grid_origin_y",
            "grid_pitch_x",
            "grid_pitch_y",
        ];
        let present = grid_keys.iter().filter(|k| kv.has(k)).count();
        let grid = match present {
            0 => None,
            4 => {
                let g = Grid {
                    origin_x: T::lit(kv.num("grid_origin_x")?),
                    origin_y: T::lit(kv.num("grid_origin_y")?),
                    pitch_x: T::lit(kv.num("grid_pitch_x")?),
                    pitch_y: T::lit(kv.num("grid_pitch_y")?),
                };
                Some(g)
            }
            _ => return Err(Error::parse(0, "grid needs all four grid_* keys")),
        };

        let sidecar = Sidecar {
            codec,
            z_min: T::lit(z_min),
            range: T::lit(range),
            image_format,
            width,
            height,
            approx,
            grid,
        };
        Ok((sidecar, image_file))
    }
}

/// Parsed `key=value` lines with the byte offset of each line.
struct KeyValues<'a> {
    map: HashMap<&'a str, (u64, &'a str)>,
}

impl<'a> KeyValues<'a> {
    fn parse(text: &'a str) -> Result<Self> {
        let mut map = HashMap::new();
        let mut offset = 0u64;
        for raw in text.split_inclusive('\n') {
            let line_start = offset;
            offset += raw.len() as u64;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::parse(line_start, format!("expected key=value, got {line:?}"))
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(Error::parse(line_start, format!("unknown key {k:?}")));
            }
            if map.insert(k, (line_start, v)).is_some() {
                return Err(Error::parse(line_start, format!("duplicate key {k:?}")));
            }
        }
        Ok(KeyValues { map })
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn get(&self, key: &str) -> Result<(u64, &'a str)> {
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| Error::parse(0, format!("missing key {key:?}")))
    }

    fn num<V: std::str::FromStr>(&self, key: &str) -> Result<V> {
        let (offset, v) = self.get(key)?;
        v.parse()
            .map_err(|_| Error::parse(offset, format!("bad value {v:?} for {key}")))
    }

    fn error(&self, key: &str, message: String) -> Error {
        Error::parse(self.map.get(key).map_or(0, |e| e.0), message)
    }

    fn reject(&self, key: &str) -> Result<()> {
        match self.map.get(key) {
            Some((offset, _)) => Err(Error::parse(
                *offset,
                format!("key {key:?} does not apply here"),
            )),
            None => Ok(()),
        }
    }

    fn reject_all(&self, keys: &[&str]) -> Result<()> {
        keys.iter().try_for_each(|k| self.reject(k))
    }
}
