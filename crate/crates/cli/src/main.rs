//! Command-line front end: compress/decompress raw little-endian arrays,
//! evaluate reconstruction quality, sweep rate-distortion curves, and
//! generate synthetic test fields.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mebc_core::metrics::{self, EvalReport};
use mebc_core::pipeline::AnyGrid;
use mebc_core::synth::SynthKind;
use mebc_core::{
    CompressionConfig, Dtype, Error, ErrorMode, Grid, PipelineKind, Scalar,
};

const EXIT_CONFIG: i32 = 2;
const EXIT_CORRUPTION: i32 = 3;
const EXIT_BOUND: i32 = 4;

#[derive(Parser)]
#[command(
    name = "mebc",
    version,
    about = "Error-bounded lossy compression for multidimensional float grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DtypeArg {
    F32,
    F64,
}

impl DtypeArg {
    fn dtype(self) -> Dtype {
        match self {
            DtypeArg::F32 => Dtype::F32,
            DtypeArg::F64 => Dtype::F64,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Abs,
    Rel,
}

impl ModeArg {
    fn mode(self) -> ErrorMode {
        match self {
            ModeArg::Abs => ErrorMode::Abs,
            ModeArg::Rel => ErrorMode::RelPointwise,
        }
    }
}

/// Grid extents parsed from one comma-separated argument. Wrapped so clap
/// treats the whole list as a single value.
#[derive(Clone)]
struct DimsArg(Vec<usize>);

fn parse_dims(s: &str) -> Result<DimsArg, String> {
    let dims: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if !d.is_empty() && d.len() <= 4 => Ok(DimsArg(d)),
        Ok(d) => Err(format!("expected 1 to 4 comma-separated extents, got {}", d.len())),
        Err(e) => Err(format!("bad extent list {s:?}: {e}")),
    }
}

fn parse_pipeline(s: &str) -> Result<PipelineKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "lr" => Ok(PipelineKind::Lr),
        "interp" => Ok(PipelineKind::Interp),
        "adaptive" => Ok(PipelineKind::Adaptive),
        other => {
            if let Some(k) = other.strip_prefix("trunc:") {
                let keep: u8 = k
                    .parse()
                    .map_err(|e| format!("bad truncation byte count {k:?}: {e}"))?;
                Ok(PipelineKind::Truncation { keep_bytes: keep })
            } else {
                Err(format!(
                    "unknown pipeline {s:?}; expected lr, interp, adaptive, or trunc:K"
                ))
            }
        }
    }
}

#[derive(Args)]
struct GridShape {
    /// Element type of the raw input file.
    #[arg(short = 't', long = "type", value_enum)]
    dtype: DtypeArg,
    /// Grid extents, slowest axis first, e.g. 128,64,64.
    #[arg(short = 'd', long = "dims", value_parser = parse_dims)]
    dims: DimsArg,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a raw little-endian array into a stream.
    Compress {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[command(flatten)]
        shape: GridShape,
        /// Error mode: abs (absolute) or rel (pointwise relative).
        #[arg(short = 'M', long = "mode", value_enum, default_value = "abs")]
        mode: ModeArg,
        /// Error bound (data units for abs, fraction for rel).
        #[arg(short = 'e', long = "error-bound")]
        error_bound: f64,
        /// Pipeline: lr, interp, adaptive, or trunc:K (keep K bytes).
        #[arg(short = 'p', long, value_parser = parse_pipeline, default_value = "lr")]
        pipeline: PipelineKind,
    },
    /// Decompress a stream back into a raw little-endian array.
    Decompress {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Compare an original and a decompressed raw array.
    Eval {
        #[arg(short = 'a', long)]
        original: PathBuf,
        #[arg(short = 'b', long)]
        decompressed: PathBuf,
        #[command(flatten)]
        shape: GridShape,
        /// Optional absolute bound to enforce; violations exit with code 4.
        #[arg(short = 'e', long = "error-bound")]
        error_bound: Option<f64>,
    },
    /// Sweep error bounds and report a rate-distortion table.
    Rd {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[command(flatten)]
        shape: GridShape,
        #[arg(short = 'M', long = "mode", value_enum, default_value = "abs")]
        mode: ModeArg,
        #[arg(short = 'p', long, value_parser = parse_pipeline, default_value = "lr")]
        pipeline: PipelineKind,
        /// Comma-separated error bounds, one compression run each.
        #[arg(long = "eb-list", value_delimiter = ',')]
        eb_list: Vec<f64>,
        /// Write the table as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate a synthetic field as a raw little-endian array.
    Gen {
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[command(flatten)]
        shape: GridShape,
        /// Field kind: CONSTANT, AFFINE, SINES, NOISE, or INTEGER_COUNTS.
        #[arg(short = 'k', long)]
        kind: String,
        #[arg(short = 's', long, default_value = "0")]
        seed: u64,
    },
}

/// Failures carry the process exit code alongside the message.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Corruption { .. } => EXIT_CORRUPTION,
            Error::Config(_) | Error::NonFinite { .. } => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_CONFIG, message: format!("{}: {e}", path.display()) }
}

fn read_elements<T: Scalar>(path: &Path, expected: usize) -> CliResult<Vec<T>> {
    let bytes = fs::read(path).map_err(|e| io_fail(path, e))?;
    if bytes.len() != expected * T::BYTES {
        return Err(Failure {
            code: EXIT_CONFIG,
            message: format!(
                "{}: holds {} bytes but the given shape needs {}",
                path.display(),
                bytes.len(),
                expected * T::BYTES
            ),
        });
    }
    Ok(bytes.chunks_exact(T::BYTES).map(T::read_le).collect())
}

fn write_elements<T: Scalar>(path: &Path, data: &[T]) -> CliResult<()> {
    let mut bytes = Vec::with_capacity(data.len() * T::BYTES);
    for x in data {
        x.write_le(&mut bytes);
    }
    fs::write(path, bytes).map_err(|e| io_fail(path, e))
}

fn read_grid<T: Scalar>(path: &Path, dims: &[usize]) -> CliResult<Grid<T>> {
    let n = dims.iter().product();
    let data = read_elements::<T>(path, n)?;
    Ok(Grid::new(dims.to_vec(), data)?)
}

fn main() {
    let cli = Cli::parse();
    if let Err(f) = run(cli) {
        eprintln!("error: {}", f.message);
        std::process::exit(f.code);
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compress { input, output, shape, mode, error_bound, pipeline } => {
            match shape.dtype.dtype() {
                Dtype::F32 => compress_cmd::<f32>(&input, &output, &shape.dims.0, mode.mode(), error_bound, pipeline),
                Dtype::F64 => compress_cmd::<f64>(&input, &output, &shape.dims.0, mode.mode(), error_bound, pipeline),
            }
        }
        Command::Decompress { input, output } => decompress_cmd(&input, &output),
        Command::Eval { original, decompressed, shape, error_bound } => match shape.dtype.dtype() {
            Dtype::F32 => eval_cmd::<f32>(&original, &decompressed, &shape.dims.0, error_bound),
            Dtype::F64 => eval_cmd::<f64>(&original, &decompressed, &shape.dims.0, error_bound),
        },
        Command::Rd { input, shape, mode, pipeline, eb_list, csv } => match shape.dtype.dtype() {
            Dtype::F32 => rd_cmd::<f32>(&input, &shape.dims.0, mode.mode(), pipeline, &eb_list, csv.as_deref()),
            Dtype::F64 => rd_cmd::<f64>(&input, &shape.dims.0, mode.mode(), pipeline, &eb_list, csv.as_deref()),
        },
        Command::Gen { output, shape, kind, seed } => {
            let kind: SynthKind = kind.parse()?;
            match shape.dtype.dtype() {
                Dtype::F32 => {
                    let grid = mebc_core::synth::generate::<f32>(kind, &shape.dims.0, seed)?;
                    write_elements(&output, grid.data())
                }
                Dtype::F64 => {
                    let grid = mebc_core::synth::generate::<f64>(kind, &shape.dims.0, seed)?;
                    write_elements(&output, grid.data())
                }
            }
        }
    }
}

fn throughput_mbps(bytes: usize, seconds: f64) -> f64 {
    if seconds > 0.0 {
        bytes as f64 / seconds / 1e6
    } else {
        f64::INFINITY
    }
}

fn compress_cmd<T: Scalar>(
    input: &Path,
    output: &Path,
    dims: &[usize],
    mode: ErrorMode,
    error_bound: f64,
    pipeline: PipelineKind,
) -> CliResult<()> {
    let grid = read_grid::<T>(input, dims)?;
    let config = CompressionConfig::new(mode, error_bound, pipeline);
    let start = Instant::now();
    let stream = mebc_core::compress(&grid, &config)?;
    let seconds = start.elapsed().as_secs_f64();
    fs::write(output, &stream).map_err(|e| io_fail(output, e))?;
    let raw_bytes = grid.len() * T::BYTES;
    println!(
        "compressed {} -> {} bytes  ratio {:.2}  bit rate {:.3}  {:.1} MB/s",
        raw_bytes,
        stream.len(),
        metrics::compression_ratio(raw_bytes, stream.len()),
        metrics::bit_rate(stream.len(), grid.len().max(1)),
        throughput_mbps(raw_bytes, seconds),
    );
    Ok(())
}

fn decompress_cmd(input: &Path, output: &Path) -> CliResult<()> {
    let stream = fs::read(input).map_err(|e| io_fail(input, e))?;
    let start = Instant::now();
    let grid = mebc_core::decompress(&stream)?;
    let seconds = start.elapsed().as_secs_f64();
    let (dims, raw_bytes) = match &grid {
        AnyGrid::F32(g) => {
            write_elements(output, g.data())?;
            (g.dims().to_vec(), g.len() * 4)
        }
        AnyGrid::F64(g) => {
            write_elements(output, g.data())?;
            (g.dims().to_vec(), g.len() * 8)
        }
    };
    println!(
        "decompressed {:?} ({} bytes)  {:.1} MB/s",
        dims,
        raw_bytes,
        throughput_mbps(raw_bytes, seconds),
    );
    Ok(())
}

fn print_report(r: &EvalReport) {
    println!(
        "elements {}  range {:.6}  max_abs_err {:.6e}  mse {:.6e}  psnr {}",
        r.elements,
        r.value_range,
        r.max_abs_err,
        r.mse,
        format_db(r.psnr),
    );
}

fn format_db(psnr: f64) -> String {
    if psnr.is_infinite() && psnr > 0.0 {
        "inf".to_string()
    } else {
        format!("{psnr:.3}")
    }
}

fn eval_cmd<T: Scalar>(
    original: &Path,
    decompressed: &Path,
    dims: &[usize],
    error_bound: Option<f64>,
) -> CliResult<()> {
    let n = dims.iter().product();
    let a = read_elements::<T>(original, n)?;
    let b = read_elements::<T>(decompressed, n)?;
    let report = metrics::eval(&a, &b)?;
    print_report(&report);
    if let Some(eb) = error_bound {
        if report.max_abs_err > eb {
            return Err(Failure {
                code: EXIT_BOUND,
                message: format!(
                    "max absolute error {:.6e} exceeds the bound {eb:.6e}",
                    report.max_abs_err
                ),
            });
        }
    }
    Ok(())
}

fn max_relative_error<T: Scalar>(orig: &[T], back: &[T]) -> f64 {
    orig.iter()
        .zip(back)
        .map(|(a, b)| {
            let (a, b) = (a.to_f64(), b.to_f64());
            if a == 0.0 {
                if b == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (a - b).abs() / a.abs()
            }
        })
        .fold(0.0, f64::max)
}

fn rd_cmd<T: Scalar>(
    input: &Path,
    dims: &[usize],
    mode: ErrorMode,
    pipeline: PipelineKind,
    eb_list: &[f64],
    csv: Option<&Path>,
) -> CliResult<()> {
    if eb_list.is_empty() {
        return Err(Failure {
            code: EXIT_CONFIG,
            message: "rd needs at least one bound in --eb-list".to_string(),
        });
    }
    let grid = read_grid::<T>(input, dims)?;
    let raw_bytes = grid.len() * T::BYTES;
    let mut rows = Vec::new();
    let mut violation: Option<String> = None;
    println!("eb,compressed_bytes,ratio,bit_rate,psnr,max_abs_err,c_MBps,d_MBps");
    for &eb in eb_list {
        let config = CompressionConfig::new(mode, eb, pipeline);
        let c0 = Instant::now();
        let stream = mebc_core::compress(&grid, &config)?;
        let c_secs = c0.elapsed().as_secs_f64();
        let d0 = Instant::now();
        let back = mebc_core::decompress(&stream)?;
        let d_secs = d0.elapsed().as_secs_f64();
        let decoded: Vec<T> = match back {
            AnyGrid::F32(g) => g.data().iter().map(|&v| T::from_f64(v as f64)).collect(),
            AnyGrid::F64(g) => g.data().iter().map(|&v| T::from_f64(v)).collect(),
        };
        let report = metrics::eval(grid.data(), &decoded)?;
        // Truncation derives its error from the kept byte count, not from
        // the stated bound, so only the error-bounded pipelines are policed.
        if !matches!(pipeline, PipelineKind::Truncation { .. }) {
            let observed = match mode {
                ErrorMode::Abs => report.max_abs_err,
                ErrorMode::RelPointwise => max_relative_error(grid.data(), &decoded),
            };
            if observed > eb && violation.is_none() {
                violation = Some(format!("bound {eb:.6e} violated: observed {observed:.6e}"));
            }
        }
        let row = format!(
            "{eb:.6e},{},{:.4},{:.4},{},{:.6e},{:.2},{:.2}",
            stream.len(),
            metrics::compression_ratio(raw_bytes, stream.len()),
            metrics::bit_rate(stream.len(), grid.len().max(1)),
            format_db(report.psnr),
            report.max_abs_err,
            throughput_mbps(raw_bytes, c_secs),
            throughput_mbps(raw_bytes, d_secs),
        );
        println!("{row}");
        rows.push(row);
    }
    if let Some(path) = csv {
        let mut text = String::from("eb,compressed_bytes,ratio,bit_rate,psnr,max_abs_err,c_MBps,d_MBps\n");
        for row in &rows {
            text.push_str(row);
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| io_fail(path, e))?;
    }
    match violation {
        Some(message) => Err(Failure { code: EXIT_BOUND, message }),
        None => Ok(()),
    }
}
