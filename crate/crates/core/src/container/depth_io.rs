//! Floating-point depth map files: PFM, RAWF32 and CSV.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::DepthMap;
use crate::scalar::Scalar;

const RAW_MAGIC: &[u8; 4] = b"RZR1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthFormat {
    /// Grayscale portable float map (`Pf`).
    Pfm,
    /// `RZR1` magic, little-endian u32 width and height, row-major f32 pixels.
    RawF32,
    /// One image row per line, comma separated; empty or `nan` cells are holes.
    Csv,
}

impl DepthFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or_default()
            .to_ascii_lowercase();
        match ext.as_str() {
            "pfm" => Ok(DepthFormat::Pfm),
            "raw" | "rawf32" | "rzr" => Ok(DepthFormat::RawF32),
            "csv" => Ok(DepthFormat::Csv),
            _ => Err(Error::UnsupportedFormat(format!(
                "cannot infer depth format from {}",
                path.display()
            ))),
        }
    }
}

impl FromStr for DepthFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pfm" => Ok(DepthFormat::Pfm),
            "rawf32" | "raw" => Ok(DepthFormat::RawF32),
            "csv" => Ok(DepthFormat::Csv),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl fmt::Display for DepthFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepthFormat::Pfm => "pfm",
            DepthFormat::RawF32 => "rawf32",
            DepthFormat::Csv => "csv",
        })
    }
}

/// Reads a depth file and multiplies every value by `unit_scale` to get
/// millimeters. Non-finite values become holes; valid values are kept at
/// single precision.
pub fn read_depth<T: Scalar>(
    path: &Path,
    format: DepthFormat,
    unit_scale: f64,
) -> Result<DepthMap<T>> {
    if !(unit_scale > 0.0) || !unit_scale.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "unit scale must be positive, got {unit_scale}"
        )));
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (width, height, raw) = match format {
        DepthFormat::Pfm => parse_pfm(&bytes)?,
        DepthFormat::RawF32 => parse_raw(&bytes)?,
        DepthFormat::Csv => parse_csv(&bytes)?,
    };
    let values = raw
        .into_iter()
        .map(|v| T::lit(v * unit_scale).to_single())
        .collect();
    DepthMap::from_values(width, height, values)
}

pub fn write_depth<T: Scalar>(path: &Path, z: &DepthMap<T>, format: DepthFormat) -> Result<()> {
    let bytes = match format {
        DepthFormat::Pfm => encode_pfm(z),
        DepthFormat::RawF32 => encode_raw(z),
        DepthFormat::Csv => encode_csv(z)?,
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn stored_f32<T: Scalar>(z: &DepthMap<T>, i: usize) -> f32 {
    if z.mask()[i] {
        z.values()[i].to_f32().unwrap_or(f32::NAN)
    } else {
        f32::NAN
    }
}

fn encode_pfm<T: Scalar>(z: &DepthMap<T>) -> Vec<u8> {
    let (w, h) = z.dims();
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 4);
    // PFM stores the bottom row first.
    for row in (0..h).rev() {
        for col in 0..w {
            out.extend_from_slice(&stored_f32(z, row * w + col).to_le_bytes());
        }
    }
    out
}

fn encode_raw<T: Scalar>(z: &DepthMap<T>) -> Vec<u8> {
    let (w, h) = z.dims();
    let mut out = Vec::with_capacity(12 + w * h * 4);
    out.extend_from_slice(RAW_MAGIC);
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    for i in 0..w * h {
        out.extend_from_slice(&stored_f32(z, i).to_le_bytes());
    }
    out
}

fn encode_csv<T: Scalar>(z: &DepthMap<T>) -> Result<Vec<u8>> {
    let (w, h) = z.dims();
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in 0..h {
        let cells = (0..w).map(|col| {
            let v = stored_f32(z, row * w + col);
            if v.is_finite() {
                v.to_string()
            } else {
                "nan".to_string()
            }
        });
        wtr.write_record(cells)
            .map_err(|e| Error::Encode(format!("csv: {e}")))?;
    }
    wtr.into_inner()
        .map_err(|e| Error::Encode(format!("csv: {e}")))
}

/// Splits the next whitespace-delimited header token.
fn header_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::parse(start as u64, "unexpected end of header"));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn parse_dim(token: &str, at: usize) -> Result<usize> {
    match token.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::parse(at as u64, format!("bad dimension {token:?}"))),
    }
}

fn parse_pfm(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    let mut pos = 0;
    let magic = header_token(bytes, &mut pos)?;
    match magic.as_str() {
        "Pf" => {}
        "PF" => return Err(Error::UnsupportedFormat("color PFM (PF)".into())),
        _ => return Err(Error::parse(0, format!("bad PFM magic {magic:?}"))),
    }
    let at = pos;
    let width = parse_dim(&header_token(bytes, &mut pos)?, at)?;
    let at = pos;
    let height = parse_dim(&header_token(bytes, &mut pos)?, at)?;
    let at = pos;
    let scale_tok = header_token(bytes, &mut pos)?;
    let scale: f64 = scale_tok
        .parse()
        .ok()
        .filter(|s: &f64| *s != 0.0 && s.is_finite())
        .ok_or_else(|| Error::parse(at as u64, format!("bad PFM scale {scale_tok:?}")))?;
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let little = scale < 0.0;
    let need = width * height * 4;
    let data = bytes.get(pos..).unwrap_or_default();
    if data.len() < need {
        return Err(Error::parse(
            (pos + data.len()) as u64,
            format!(
                "PFM raster truncated: need {need} bytes, found {}",
                data.len()
            ),
        ));
    }
    let mut values = vec![0.0; width * height];
    for (k, chunk) in data[..need].chunks_exact(4).enumerate() {
        let word = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(word)
        } else {
            f32::from_be_bytes(word)
        };
        let (row, col) = (height - 1 - k / width, k % width);
        values[row * width + col] = f64::from(v);
    }
    Ok((width, height, values))
}

fn parse_raw(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    if bytes.len() < 12 {
        return Err(Error::parse(bytes.len() as u64, "RAWF32 header truncated"));
    }
    if &bytes[..4] != RAW_MAGIC {
        return Err(Error::parse(0, "bad RAWF32 magic"));
    }
    let width = u32::from_le_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]) as usize;
    let height = u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize;
    if width == 0 || height == 0 {
        return Err(Error::parse(4, format!("bad dimensions {width}x{height}")));
    }
    let need = width * height * 4;
    let data = &bytes[12..];
    if data.len() < need {
        return Err(Error::parse(
            bytes.len() as u64,
            format!(
                "RAWF32 raster truncated: need {need} bytes, found {}",
                data.len()
            ),
        ));
    }
    let values = data[..need]
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect();
    Ok((width, height, values))
}

fn parse_csv(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let mut width = None;
    let mut values = Vec::new();
    let mut height = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let offset = e.position().map(|p| p.byte()).unwrap_or(0);
            Error::parse(offset, e.to_string())
        })?;
        let offset = record.position().map(|p| p.byte()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::parse(
                    offset,
                    format!("row {height} has {} cells, expected {w}", record.len()),
                ))
            }
            _ => {}
        }
        for cell in record.iter() {
            let v = if cell.is_empty() || cell.eq_ignore_ascii_case("nan") {
                f64::NAN
            } else {
                cell.parse::<f64>()
                    .map_err(|_| Error::parse(offset, format!("bad number {cell:?}")))?
            };
            values.push(v);
        }
        height += 1;
    }
    let width = width.ok_or_else(|| Error::parse(0, "empty CSV"))?;
    Ok((width, height, values))
}
