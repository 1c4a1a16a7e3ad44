//! PNG and JPEG encoding of the 8-bit RGB carrier and the 16-bit thumbnail.

use std::fmt;
use std::io::Cursor;

use jpeg_encoder::{ColorType, SamplingFactor};

use crate::codec::EncodedImage;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImageFormat {
    Png,
    /// Baseline JPEG. Quality below 95 uses 4:2:0 chroma subsampling,
    /// 95 and above keeps full chroma.
    Jpeg {
        quality: u8,
    },
}

impl ImageFormat {
    pub fn jpeg(quality: u8) -> Result<Self> {
        if !(1..=100).contains(&quality) {
            return Err(Error::InvalidConfig(format!(
                "jpeg quality must be in 1..=100, got {quality}"
            )));
        }
        Ok(ImageFormat::Jpeg { quality })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Jpeg { .. } => "jpeg",
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Jpeg { .. } => "jpg",
        }
    }

    pub fn quality(&self) -> Option<u8> {
        match self {
            ImageFormat::Png => None,
            ImageFormat::Jpeg { quality } => Some(*quality),
        }
    }
}

impl fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageFormat::Png => f.write_str("png"),
            ImageFormat::Jpeg { quality } => write!(f, "jpeg{quality}"),
        }
    }
}

pub fn encode_image(img: &EncodedImage, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Png => encode_png_rgb(img),
        ImageFormat::Jpeg { quality } => encode_jpeg(img, quality),
    }
}

pub fn decode_image(bytes: &[u8], format: ImageFormat) -> Result<EncodedImage> {
    match format {
        ImageFormat::Png => decode_png_rgb(bytes),
        ImageFormat::Jpeg { .. } => decode_jpeg(bytes),
    }
}

fn png_dims(width: usize, height: usize) -> Result<(u32, u32)> {
    match (u32::try_from(width), u32::try_from(height)) {
        (Ok(w), Ok(h)) => Ok((w, h)),
        _ => Err(Error::Encode(format!(
            "{width}x{height} is too large for PNG"
        ))),
    }
}

fn write_png(
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: &[u8],
) -> Result<Vec<u8>> {
    let (w, h) = png_dims(width, height)?;
    let mut out = Vec::new();
    let mut enc = png::Encoder::new(&mut out, w, h);
    enc.set_color(color);
    enc.set_depth(depth);
    enc.set_compression(png::Compression::High);
    let mut writer = enc
        .write_header()
        .map_err(|e| Error::Encode(format!("png: {e}")))?;
    writer
        .write_image_data(data)
        .map_err(|e| Error::Encode(format!("png: {e}")))?;
    writer
        .finish()
        .map_err(|e| Error::Encode(format!("png: {e}")))?;
    Ok(out)
}

fn read_png(bytes: &[u8]) -> Result<(png::OutputInfo, Vec<u8>)> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Decode(format!("png: {e}")))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Decode("png: image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Decode(format!("png: {e}")))?;
    buf.truncate(info.buffer_size());
    Ok((info, buf))
}

fn encode_png_rgb(img: &EncodedImage) -> Result<Vec<u8>> {
    write_png(
        img.width,
        img.height,
        png::ColorType::Rgb,
        png::BitDepth::Eight,
        &img.interleaved(),
    )
}

fn decode_png_rgb(bytes: &[u8]) -> Result<EncodedImage> {
    let (info, buf) = read_png(bytes)?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Decode(format!(
            "expected 8-bit RGB PNG, found {:?} {:?}",
            info.color_type, info.bit_depth
        )));
    }
    EncodedImage::from_interleaved(info.width as usize, info.height as usize, &buf)
}

fn encode_jpeg(img: &EncodedImage, quality: u8) -> Result<Vec<u8>> {
    let (w, h) = match (u16::try_from(img.width), u16::try_from(img.height)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => {
            return Err(Error::Encode(format!(
                "{}x{} exceeds the JPEG size limit",
                img.width, img.height
            )))
        }
    };
    let mut out = Vec::new();
    let mut enc = jpeg_encoder::Encoder::new(&mut out, quality);
    enc.set_sampling_factor(if quality < 95 {
        SamplingFactor::R_4_2_0
    } else {
        SamplingFactor::R_4_4_4
    });
    enc.encode(&img.interleaved(), w, h, ColorType::Rgb)
        .map_err(|e| Error::Encode(format!("jpeg: {e}")))?;
    Ok(out)
}

fn decode_jpeg(bytes: &[u8]) -> Result<EncodedImage> {
    let mut dec = jpeg_decoder::Decoder::new(Cursor::new(bytes));
    let pixels = dec
        .decode()
        .map_err(|e| Error::Decode(format!("jpeg: {e}")))?;
    let info = dec
        .info()
        .ok_or_else(|| Error::Decode("jpeg: missing header".into()))?;
    if info.pixel_format != jpeg_decoder::PixelFormat::RGB24 {
        return Err(Error::Decode(format!(
            "expected RGB JPEG, found {:?}",
            info.pixel_format
        )));
    }
    EncodedImage::from_interleaved(info.width as usize, info.height as usize, &pixels)
}

/// Writes 16-bit grayscale samples as a PNG (big-endian per the PNG format).
pub fn encode_png_gray16(width: usize, height: usize, samples: &[u16]) -> Result<Vec<u8>> {
    if samples.len() != width * height {
        return Err(Error::Encode(format!(
            "expected {} samples for {width}x{height}, got {}",
            width * height,
            samples.len()
        )));
    }
    let data: Vec<u8> = samples.iter().flat_map(|s| s.to_be_bytes()).collect();
    write_png(
        width,
        height,
        png::ColorType::Grayscale,
        png::BitDepth::Sixteen,
        &data,
    )
}

pub fn decode_png_gray16(bytes: &[u8]) -> Result<(usize, usize, Vec<u16>)> {
    let (info, buf) = read_png(bytes)?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Sixteen {
        return Err(Error::Decode(format!(
            "expected 16-bit grayscale PNG, found {:?} {:?}",
            info.color_type, info.bit_depth
        )));
    }
    let samples = buf
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    Ok((info.width as usize, info.height as usize, samples))
}
