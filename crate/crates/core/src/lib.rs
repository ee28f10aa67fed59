//! Error-bounded lossy compression for multidimensional floating-point
//! grids, organized as a five-stage pipeline: preprocess, predict,
//! quantize, encode, lossless. Each stage is a swappable module; the
//! stream header records which modules were used so the decompressor
//! rebuilds the exact pipeline without out-of-band knowledge.

pub mod bytes;
pub mod config;
pub mod encoder;
pub mod error;
pub mod grid;
pub mod lossless;
pub mod metrics;
pub mod pipeline;
pub mod predictor;
pub mod preprocess;
pub mod quantizer;
pub mod scalar;
pub mod stream;
pub mod synth;

pub use config::{CompressionConfig, ErrorMode, LosslessKind, PipelineKind};
pub use error::{Error, Result};
pub use grid::Grid;
pub use pipeline::{compress, decompress, AnyGrid};
pub use scalar::{Dtype, Scalar};
