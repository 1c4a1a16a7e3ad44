use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use drr_core::analysis::{
    approximation_overhead, bits_per_pixel, min_periods_for_target, raw_size_from_ranges,
    raw_size_report, rms_error, sweep, write_sweep_csv, Geometry, RawSizeReport, SweepConfig,
    SweepRow, DEFAULT_OUTLIER_THRESHOLD_MM, DEFAULT_PERIODS,
};
use drr_core::approximation::{ApproximationSpec, SphereParams, Transform4x4};
use drr_core::codec::{CodecConfig, Method};
use drr_core::container::{read_container, read_depth, write_depth, DepthFormat, ImageFormat};
use drr_core::geometry::{depth_stats, make_hemisphere, DepthMap};
use drr_core::pipeline::{decode_container, encode_to_path, ApproxChoice};
use drr_core::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_CONTAINER: u8 = 3;
const EXIT_ANALYSIS: u8 = 4;
const EXIT_UNREACHABLE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "drr",
    version,
    about = "Depth range reduction and phase-shifting depth-map codecs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a depth map into a container.
    Encode(EncodeArgs),
    /// Decode a container back to a depth map.
    Decode(DecodeArgs),
    /// Run the rate-distortion sweep and print CSV.
    Sweep(SweepArgs),
    /// Report raw bits per pixel before and after range reduction.
    Bits(BitsArgs),
    /// Write the synthetic hemisphere fixture.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Depth map (.pfm, .raw, .csv).
    input: PathBuf,
    /// Override the format inferred from the extension.
    #[arg(long, value_parser = parse_depth_format)]
    input_format: Option<DepthFormat>,
    /// Multiplier converting file units to millimeters.
    #[arg(long, default_value_t = 1.0)]
    unit_scale: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxKind {
    Identity,
    Thumbnail,
    Sphere,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long, value_enum, default_value_t = ApproxKind::Thumbnail)]
    approx: ApproxKind,
    /// Thumbnail block width in pixels.
    #[arg(long, default_value_t = 32)]
    block: usize,
    /// Thumbnail block height; defaults to the block width.
    #[arg(long)]
    block_h: Option<usize>,
    /// Sphere as cx,cy,cz,r. Without it the sphere is fit to the data.
    #[arg(long, value_parser = parse_floats::<4>)]
    sphere: Option<[f64; 4]>,
    /// Sphere alignment translation x,y,z.
    #[arg(long, value_parser = parse_floats::<3>)]
    translate: Option<[f64; 3]>,
    /// Sphere alignment rotation axis x,y,z.
    #[arg(long, value_parser = parse_floats::<3>)]
    axis: Option<[f64; 3]>,
    /// Sphere alignment rotation angle in radians.
    #[arg(long, default_value_t = 0.0)]
    angle: f64,
    /// Sphere alignment scale x,y,z.
    #[arg(long, value_parser = parse_floats::<3>)]
    scale: Option<[f64; 3]>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Png,
    Jpeg,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    approx: ApproxArgs,
    /// Container base path; writes <out>.sidecar and image parts beside it.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_parser = parse_method, default_value = "mwd")]
    method: Method,
    /// Number of fringe periods across the encoded depth range.
    #[arg(short, long, default_value_t = 2.0)]
    n: f64,
    /// Stair levels for DD (at least ceil(n)).
    #[arg(long)]
    stair_levels: Option<u32>,
    #[arg(long, value_enum, default_value_t = FormatArg::Png)]
    format: FormatArg,
    #[arg(long, default_value_t = 95)]
    quality: u8,
}

#[derive(Args)]
struct DecodeArgs {
    /// Container base path or .sidecar file.
    container: PathBuf,
    /// Output depth map.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_parser = parse_depth_format)]
    output_format: Option<DepthFormat>,
    /// Reference depth map for an error report.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, value_parser = parse_depth_format)]
    reference_format: Option<DepthFormat>,
    /// Unit scale of the reference file.
    #[arg(long, default_value_t = 1.0)]
    unit_scale: f64,
    /// Errors above this many millimeters are excluded from the RMS.
    #[arg(long, default_value_t = DEFAULT_OUTLIER_THRESHOLD_MM)]
    threshold: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    approx: ApproxArgs,
    /// Comma-separated period counts.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_PERIODS.to_vec())]
    periods: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "mwd")]
    methods: Vec<Method>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "png")]
    formats: Vec<FormatArg>,
    #[arg(long, default_value_t = 95)]
    quality: u8,
    #[arg(long, default_value_t = DEFAULT_OUTLIER_THRESHOLD_MM)]
    threshold: f64,
    /// Report the fewest periods reaching this RMS for both geometries.
    #[arg(long)]
    target_rms: Option<f64>,
    /// Write CSV here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BitsArgs {
    /// Depth map to analyze; omit when giving explicit ranges.
    input: Option<PathBuf>,
    #[arg(long, value_parser = parse_depth_format)]
    input_format: Option<DepthFormat>,
    #[arg(long, default_value_t = 1.0)]
    unit_scale: f64,
    #[command(flatten)]
    approx: ApproxArgs,
    /// Required precision in millimeters.
    #[arg(long)]
    precision: f64,
    /// Explicit original range in millimeters.
    #[arg(long, requires_all = ["reduced_range", "pixels"], conflicts_with = "input")]
    original_range: Option<f64>,
    #[arg(long, requires = "original_range")]
    reduced_range: Option<f64>,
    #[arg(long, requires = "original_range")]
    pixels: Option<u64>,
    /// Approximation overhead in bytes for explicit ranges.
    #[arg(long, default_value_t = 0, requires = "original_range")]
    overhead: u64,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, default_value_t = 256.0)]
    radius: f64,
    #[arg(long, value_parser = parse_depth_format)]
    output_format: Option<DepthFormat>,
}

fn parse_depth_format(s: &str) -> Result<DepthFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {p:?}"))
        })
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated values, got {}", v.len()))
}

struct Failure {
    code: u8,
    error: Error,
}

type CmdResult = Result<(), Failure>;

trait Stage<T> {
    fn stage(self, code: u8) -> Result<T, Failure>;
}

impl<T> Stage<T> for drr_core::Result<T> {
    fn stage(self, code: u8) -> Result<T, Failure> {
        self.map_err(|error| Failure { code, error })
    }
}

fn usage(msg: String) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: Error::InvalidConfig(msg),
    }
}

fn depth_format(path: &Path, explicit: Option<DepthFormat>) -> Result<DepthFormat, Failure> {
    match explicit {
        Some(f) => Ok(f),
        None => DepthFormat::from_path(path).stage(EXIT_USAGE),
    }
}

fn load(
    path: &Path,
    format: Option<DepthFormat>,
    unit_scale: f64,
) -> Result<DepthMap<f64>, Failure> {
    read_depth(path, depth_format(path, format)?, unit_scale).stage(EXIT_USAGE)
}

fn image_format(format: FormatArg, quality: u8) -> Result<ImageFormat, Failure> {
    match format {
        FormatArg::Png => Ok(ImageFormat::Png),
        FormatArg::Jpeg => ImageFormat::jpeg(quality).stage(EXIT_USAGE),
    }
}

impl ApproxArgs {
    fn choice(&self) -> Result<ApproxChoice<f64>, Failure> {
        let block_h = self.block_h.unwrap_or(self.block);
        let has_transform = self.translate.is_some()
            || self.axis.is_some()
            || self.scale.is_some()
            || self.angle != 0.0;
        if has_transform && !matches!(self.approx, ApproxKind::Sphere) {
            return Err(usage(
                "alignment transforms apply only to --approx sphere".into(),
            ));
        }
        Ok(match self.approx {
            ApproxKind::Identity => ApproxChoice::Identity,
            ApproxKind::Thumbnail => {
                if self.block == 0 || block_h == 0 {
                    return Err(usage("block sizes must be at least 1".into()));
                }
                ApproxChoice::Thumbnail {
                    block_w: self.block,
                    block_h,
                }
            }
            ApproxKind::Sphere => match self.sphere {
                None if has_transform => {
                    return Err(usage(
                        "a fitted sphere needs no transform; pass --sphere to align one".into(),
                    ))
                }
                None => ApproxChoice::SphereFit,
                Some([cx, cy, cz, r]) => ApproxChoice::Sphere {
                    params: SphereParams::new(cx, cy, cz, r).stage(EXIT_USAGE)?,
                    transform: Transform4x4::compose(
                        self.translate.unwrap_or([0.0; 3]),
                        self.axis.unwrap_or([0.0, 0.0, 1.0]),
                        self.angle,
                        self.scale.unwrap_or([1.0; 3]),
                    )
                    .stage(EXIT_USAGE)?,
                },
            },
        })
    }

    fn spec(&self, z: &DepthMap<f64>) -> Result<ApproximationSpec<f64>, Failure> {
        self.choice()?.build_spec(z).stage(EXIT_USAGE)
    }
}

fn cmd_encode(a: EncodeArgs) -> CmdResult {
    let codec = CodecConfig::new(a.method, a.n, a.stair_levels).stage(EXIT_USAGE)?;
    let format = image_format(a.format, a.quality)?;
    a.approx.choice()?;
    let z = load(&a.input.input, a.input.input_format, a.input.unit_scale)?;
    let spec = a.approx.spec(&z)?;
    let (out, sizes) =
        encode_to_path(&z, &spec, &codec, format, &a.output).map_err(|error| Failure {
            code: match error {
                Error::Io { .. } => EXIT_USAGE,
                _ => EXIT_CONTAINER,
            },
            error,
        })?;
    let original = depth_stats(&z).stage(EXIT_USAGE)?.range;
    let reduced = out.container.sidecar.range;
    println!(
        "wrote {} ({} approximation, {} n={} {})",
        a.output.display(),
        spec.kind_name(),
        codec.method(),
        codec.periods(),
        format
    );
    println!(
        "bytes: image {} + sidecar {} + thumbnail {} = {}",
        sizes.image,
        sizes.sidecar,
        sizes.thumbnail,
        sizes.total()
    );
    println!(
        "depth range: {original:.4} mm -> {reduced:.4} mm ({:.1}% reduction)",
        100.0 * (1.0 - reduced / original)
    );
    Ok(())
}

fn cmd_decode(a: DecodeArgs) -> CmdResult {
    let out_format = depth_format(&a.output, a.output_format)?;
    let container = read_container::<f64>(&a.container).stage(EXIT_CONTAINER)?;
    let z = decode_container(&container).stage(EXIT_CONTAINER)?;
    write_depth(&a.output, &z, out_format).stage(EXIT_USAGE)?;
    println!(
        "wrote {} ({}x{})",
        a.output.display(),
        z.width(),
        z.height()
    );
    if let Some(reference) = &a.reference {
        let r = load(reference, a.reference_format, a.unit_scale)?;
        let report = rms_error(&z, &r, a.threshold).stage(EXIT_ANALYSIS)?;
        println!(
            "rms {:.6} mm, max {:.6} mm, accuracy {:.4}%, {} of {} pixels excluded above {} mm",
            report.rms_mm,
            report.max_abs_mm,
            report.accuracy_pct,
            report.outliers_excluded,
            report.compared + report.outliers_excluded,
            report.outlier_threshold_mm
        );
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    if a.periods.is_empty() {
        return Err(usage("empty period grid".into()));
    }
    let formats = a
        .formats
        .iter()
        .map(|&f| image_format(f, a.quality))
        .collect::<Result<Vec<_>, _>>()?;
    a.approx.choice()?;
    let z = load(&a.input.input, a.input.input_format, a.input.unit_scale)?;
    let spec = a.approx.spec(&z)?;
    let cfg = SweepConfig {
        periods: a.periods.clone(),
        methods: a.methods.clone(),
        formats,
        threshold_mm: a.threshold,
    };
    let rows = sweep(&z, &spec, &cfg).map_err(|error| Failure {
        code: match error {
            Error::NonPositivePeriods(_) | Error::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_ANALYSIS,
        },
        error,
    })?;
    match &a.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure {
                code: EXIT_USAGE,
                error: Error::Io {
                    path: path.clone(),
                    source: e,
                },
            })?;
            write_sweep_csv(&rows, BufWriter::new(file)).stage(EXIT_USAGE)?;
        }
        None => write_sweep_csv(&rows, io::stdout().lock()).stage(EXIT_USAGE)?,
    }
    if let Some(target) = a.target_rms {
        report_target(&rows, target)?;
    }
    Ok(())
}

/// Prints the fewest-period row meeting `target` for each method and format,
/// original geometry against reduced.
fn report_target(rows: &[SweepRow], target: f64) -> CmdResult {
    let mut groups: Vec<(Method, ImageFormat)> =
        rows.iter().map(|r| (r.method, r.image_format)).collect();
    groups.dedup();
    let mut unreachable = None;
    let mut err = io::stderr().lock();
    for (method, format) in groups {
        let pick = |g| {
            min_periods_for_target(
                rows.iter()
                    .filter(|r| r.method == method && r.image_format == format && r.geometry == g),
                target,
            )
        };
        match (pick(Geometry::Original), pick(Geometry::Reduced)) {
            (Ok(base), Ok(red)) => {
                let _ = writeln!(
                    err,
                    "{method} {format} target {target} mm: original n={} {} bytes (rms {:.4}), reduced n={} {} bytes (rms {:.4}), {:.1}% smaller",
                    base.n,
                    base.file_size_bytes,
                    base.rms_mm,
                    red.n,
                    red.file_size_bytes,
                    red.rms_mm,
                    100.0 * (1.0 - red.file_size_bytes as f64 / base.file_size_bytes as f64)
                );
            }
            (Err(e), _) | (_, Err(e)) => {
                let _ = writeln!(err, "{method} {format}: {e}");
                unreachable = Some(e);
            }
        }
    }
    match unreachable {
        Some(error) => Err(Failure {
            code: EXIT_UNREACHABLE,
            error,
        }),
        None => Ok(()),
    }
}

fn print_raw_report(r: &RawSizeReport) {
    println!(
        "original: {} bits/pixel, {} bytes ({:.1} KB)",
        r.original_bits,
        r.original_bytes,
        r.original_bytes as f64 / 1024.0
    );
    println!(
        "reduced:  {} bits/pixel, {} bytes ({:.1} KB) including {} bytes of approximation",
        r.reduced_bits,
        r.reduced_bytes,
        r.reduced_bytes as f64 / 1024.0,
        r.overhead_bytes
    );
    println!("savings:  {:.2}%", r.savings_pct);
}

fn cmd_bits(a: BitsArgs) -> CmdResult {
    bits_per_pixel(0.0, a.precision).stage(EXIT_USAGE)?;
    let report = match (&a.input, a.original_range) {
        (_, Some(original)) => raw_size_from_ranges(
            original,
            a.reduced_range.unwrap_or(original),
            a.precision,
            a.pixels.unwrap_or(0),
            a.overhead,
        )
        .stage(EXIT_USAGE)?,
        (Some(path), None) => {
            a.approx.choice()?;
            let z = load(path, a.input_format, a.unit_scale)?;
            let spec = a.approx.spec(&z)?;
            approximation_overhead(&spec).stage(EXIT_ANALYSIS)?;
            raw_size_report(&z, &spec, a.precision).stage(EXIT_ANALYSIS)?
        }
        (None, None) => return Err(usage("give an input depth map or --original-range".into())),
    };
    print_raw_report(&report);
    Ok(())
}

fn cmd_fixture(a: FixtureArgs) -> CmdResult {
    let format = depth_format(&a.output, a.output_format)?;
    let z = make_hemisphere(a.size, a.radius).stage(EXIT_USAGE)?;
    write_depth(&a.output, &z, format).stage(EXIT_USAGE)?;
    println!(
        "wrote {} ({}x{} hemisphere, radius {} mm)",
        a.output.display(),
        a.size,
        a.size,
        a.radius
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bits(a) => cmd_bits(a),
        Command::Fixture(a) => cmd_fixture(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("drr: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
