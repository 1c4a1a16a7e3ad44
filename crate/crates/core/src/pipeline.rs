//! End-to-end encode and decode of depth maps through a container.

use std::path::Path;

use crate::approximation::{
    block_mean_thumbnail, build_approximation, fit_sphere, ApproximationSpec, SphereParams,
    Transform4x4,
};
use crate::codec::{self, CodecConfig};
use crate::container::{
    container_stem, deserialize_container, read_container, serialize_container,
    write_container_bytes, Container, ContainerBytes, ContainerSizes, ImageFormat, Sidecar,
};
use crate::error::{Error, Result};
use crate::geometry::{add, subtract, DepthMap};
use crate::scalar::Scalar;

/// How to derive the approximation from the input depth map.
#[derive(Debug, Clone, PartialEq)]
pub enum ApproxChoice<T> {
    Identity,
    Thumbnail {
        block_w: usize,
        block_h: usize,
    },
    /// Least-squares fit to the valid points.
    SphereFit,
    Sphere {
        params: SphereParams<T>,
        transform: Transform4x4<T>,
    },
}

impl<T: Scalar> ApproxChoice<T> {
    pub fn build_spec(&self, z: &DepthMap<T>) -> Result<ApproximationSpec<T>> {
        match self {
            ApproxChoice::Identity => Ok(ApproximationSpec::identity()),
            ApproxChoice::Thumbnail { block_w, block_h } => Ok(ApproximationSpec::thumbnail(
                block_mean_thumbnail(z, *block_w, *block_h)?,
            )),
            ApproxChoice::SphereFit => {
                ApproximationSpec::sphere(fit_sphere(&z.points())?, Transform4x4::identity())
            }
            ApproxChoice::Sphere { params, transform } => {
                ApproximationSpec::sphere(*params, *transform)
            }
        }
    }
}

/// Result of [`encode_depth`]: the container as a decoder will see it and
/// its serialized parts.
#[derive(Debug, Clone)]
pub struct EncodeOutput<T> {
    pub container: Container<T>,
    pub bytes: ContainerBytes,
}

impl<T> EncodeOutput<T> {
    pub fn sizes(&self) -> ContainerSizes {
        self.bytes.sizes()
    }
}

/// Subtracts the approximation described by `spec`, encodes the residual and
/// serializes the container.
///
/// The approximation subtracted here is rebuilt from the serialized sidecar
/// and thumbnail, so it is exactly the one a decoder regenerates.
pub fn encode_depth<T: Scalar>(
    z: &DepthMap<T>,
    spec: &ApproximationSpec<T>,
    codec_cfg: &CodecConfig,
    image_format: ImageFormat,
    stem: &str,
) -> Result<EncodeOutput<T>> {
    let (w, h) = z.dims();
    let stored = stored_spec(spec, codec_cfg, w, h, z)?;
    let approx = build_approximation(&stored, w, h, z.grid())?;
    let residual = subtract(z, &approx)?;
    let enc = codec::encode(&residual, codec_cfg)?;
    let container = Container {
        sidecar: Sidecar {
            codec: *codec_cfg,
            z_min: enc.z_min,
            range: enc.range,
            image_format,
            width: w,
            height: h,
            approx: stored,
            grid: z.grid().copied(),
        },
        image: enc.image,
    };
    let bytes = serialize_container(&container, stem)?;
    let container = deserialize_container(&bytes)?;
    Ok(EncodeOutput { container, bytes })
}

/// Passes `spec` through the sidecar text format and returns what parses
/// back, so encoder and decoder start from identical parameters.
fn stored_spec<T: Scalar>(
    spec: &ApproximationSpec<T>,
    codec_cfg: &CodecConfig,
    w: usize,
    h: usize,
    z: &DepthMap<T>,
) -> Result<ApproximationSpec<T>> {
    let probe = Sidecar {
        codec: *codec_cfg,
        z_min: T::zero(),
        range: T::one(),
        image_format: ImageFormat::Png,
        width: w,
        height: h,
        approx: spec.clone(),
        grid: z.grid().copied(),
    };
    let thumb = spec.as_thumbnail();
    let text = probe.to_text("probe.png", thumb.map(|_| "probe.thumb.png"))?;
    let (parsed, _) = Sidecar::<T>::parse(&text, |name| match thumb {
        Some(t) => Ok((t.width(), t.height(), t.samples().to_vec())),
        None => Err(Error::MissingPart(name.to_string())),
    })?;
    Ok(parsed.approx)
}

/// Encodes and writes a container at `path` (base path or `.sidecar` path).
pub fn encode_to_path<T: Scalar>(
    z: &DepthMap<T>,
    spec: &ApproximationSpec<T>,
    codec_cfg: &CodecConfig,
    image_format: ImageFormat,
    path: &Path,
) -> Result<(EncodeOutput<T>, ContainerSizes)> {
    let stem = container_stem(path)?;
    let out = encode_depth(z, spec, codec_cfg, image_format, &stem)?;
    let sizes = write_container_bytes(path, &out.bytes, image_format)?;
    Ok((out, sizes))
}

/// Decodes the residual image and adds back the regenerated approximation.
pub fn decode_container<T: Scalar>(c: &Container<T>) -> Result<DepthMap<T>> {
    let sc = &c.sidecar;
    let residual = codec::decode(&c.image, sc.z_min, sc.range, &sc.codec)?;
    let approx = build_approximation(&sc.approx, sc.width, sc.height, sc.grid.as_ref())?;
    add(&residual, &approx)?.with_grid(sc.grid)
}

pub fn decode_from_path<T: Scalar>(path: &Path) -> Result<DepthMap<T>> {
    decode_container(&read_container(path)?)
}
