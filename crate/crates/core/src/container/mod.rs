//! On-disk formats.
//!
//! An encoded depth map is stored as a container of up to three files that
//! share a base path `X`:
//!
//! * `X.sidecar` holds the codec parameters and approximation description,
//! * `X.png` or `X.jpg` holds the 8-bit RGB image,
//! * `X.thumb.png` holds the 16-bit thumbnail when one is used.

mod depth_io;
mod image_io;
mod sidecar;

pub use depth_io::{read_depth, write_depth, DepthFormat};
pub use image_io::{decode_image, decode_png_gray16, encode_image, encode_png_gray16, ImageFormat};
pub use sidecar::{Sidecar, ThumbPixels, SIDECAR_VERSION};

use std::fs;
use std::path::{Path, PathBuf};

use crate::approximation::Approximation;
use crate::codec::EncodedImage;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Container<T> {
    pub sidecar: Sidecar<T>,
    pub image: EncodedImage,
}

/// Bytes written for each part of a container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContainerSizes {
    pub image: u64,
    pub sidecar: u64,
    pub thumbnail: u64,
}

impl ContainerSizes {
    pub fn total(&self) -> u64 {
        self.image + self.sidecar + self.thumbnail
    }
}

/// Container parts serialized in memory.
#[derive(Debug, Clone)]
pub struct ContainerBytes {
    pub sidecar: String,
    pub image: Vec<u8>,
    pub thumbnail: Option<Vec<u8>>,
}

impl ContainerBytes {
    pub fn sizes(&self) -> ContainerSizes {
        ContainerSizes {
            image: self.image.len() as u64,
            sidecar: self.sidecar.len() as u64,
            thumbnail: self.thumbnail.as_ref().map_or(0, |t| t.len() as u64),
        }
    }
}

/// Strips a trailing `.sidecar` so either the base path or the sidecar path
/// may be given.
pub fn container_base(path: &Path) -> PathBuf {
    match path.extension() {
        Some(ext) if ext == "sidecar" => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    with_suffix(&container_base(path), ".sidecar")
}

/// Serializes all parts, using `stem` to name the referenced files.
pub fn serialize_container<T: Scalar>(c: &Container<T>, stem: &str) -> Result<ContainerBytes> {
    let sc = &c.sidecar;
    if (c.image.width, c.image.height) != (sc.width, sc.height) {
        return Err(Error::dims(
            (c.image.width, c.image.height),
            (sc.width, sc.height),
        ));
    }
    let image = encode_image(&c.image, sc.image_format)?;
    let image_file = format!("{stem}.{}", sc.image_format.extension());
    let (thumbnail, thumb_file) = match sc.approx.approximation() {
        Approximation::Thumbnail(t) => (
            Some(encode_png_gray16(t.width(), t.height(), t.samples())?),
            Some(format!("{stem}.thumb.png")),
        ),
        _ => (None, None),
    };
    let sidecar = sc.to_text(&image_file, thumb_file.as_deref())?;
    Ok(ContainerBytes {
        sidecar,
        image,
        thumbnail,
    })
}

/// Parses in-memory container parts produced by [`serialize_container`].
pub fn deserialize_container<T: Scalar>(bytes: &ContainerBytes) -> Result<Container<T>> {
    let (sidecar, _) = Sidecar::parse(&bytes.sidecar, |name| match &bytes.thumbnail {
        Some(png) => decode_png_gray16(png),
        None => Err(Error::MissingPart(name.to_string())),
    })?;
    let image = decode_image(&bytes.image, sidecar.image_format)?;
    check_image(&image, &sidecar)?;
    Ok(Container { sidecar, image })
}

fn check_image<T>(image: &EncodedImage, sidecar: &Sidecar<T>) -> Result<()> {
    if (image.width, image.height) != (sidecar.width, sidecar.height) {
        return Err(Error::dims(
            (image.width, image.height),
            (sidecar.width, sidecar.height),
        ));
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<u64> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    Ok(bytes.len() as u64)
}

/// Writes `X.sidecar`, the image and (for thumbnails) `X.thumb.png`.
pub fn write_container<T: Scalar>(path: &Path, c: &Container<T>) -> Result<ContainerSizes> {
    let stem = container_stem(path)?;
    let bytes = serialize_container(c, &stem)?;
    write_container_bytes(path, &bytes, c.sidecar.image_format)
}

/// Writes parts already produced by [`serialize_container`]. The file name of
/// `path` must match the stem they were serialized with.
pub fn write_container_bytes(
    path: &Path,
    bytes: &ContainerBytes,
    format: ImageFormat,
) -> Result<ContainerSizes> {
    let base = container_base(path);
    let stem = container_stem(path)?;
    let dir = base.parent().unwrap_or(Path::new(""));
    let image_path = dir.join(format!("{stem}.{}", format.extension()));
    let mut sizes = ContainerSizes {
        image: write_file(&image_path, &bytes.image)?,
        ..Default::default()
    };
    if let Some(thumb) = &bytes.thumbnail {
        sizes.thumbnail = write_file(&dir.join(format!("{stem}.thumb.png")), thumb)?;
    }
    sizes.sidecar = write_file(&with_suffix(&base, ".sidecar"), bytes.sidecar.as_bytes())?;
    Ok(sizes)
}

/// File name of the container base, used to name its parts.
pub fn container_stem(path: &Path) -> Result<String> {
    let stem = file_name(&container_base(path));
    if stem.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "container path {} has no file name",
            path.display()
        )));
    }
    Ok(stem)
}

/// Reads a container given its base path or its `.sidecar` path. File names
/// inside the sidecar resolve relative to the sidecar's directory.
pub fn read_container<T: Scalar>(path: &Path) -> Result<Container<T>> {
    let sc_path = sidecar_path(path);
    let text = fs::read_to_string(&sc_path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingPart(sc_path.display().to_string()),
        _ => Error::io(&sc_path, e),
    })?;
    let dir = sc_path.parent().unwrap_or(Path::new(""));
    let read_part = |name: &str| -> Result<Vec<u8>> {
        let p = dir.join(name);
        fs::read(&p).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingPart(p.display().to_string()),
            _ => Error::io(&p, e),
        })
    };
    let (sidecar, image_file) = Sidecar::parse(&text, |name| decode_png_gray16(&read_part(name)?))?;
    let image = decode_image(&read_part(&image_file)?, sidecar.image_format)?;
    check_image(&image, &sidecar)?;
    Ok(Container { sidecar, image })
}
