//! Assembles the five stages into complete compressors and rebuilds them
//! from the stream header alone. Three dense routes (blockwise composite,
//! flat previous-value, multilevel interpolation) share the linear
//! quantizer and dynamic Huffman stages; byte truncation bypasses both; the
//! adaptive route inspects the data and picks the near-lossless integer
//! stack (transpose, flat Lorenzo, escape quantizer, fixed Huffman) when a
//! tight bound meets integer-valued samples.

pub mod interp;
pub mod lr;
pub mod truncation;

use crate::config::{CompressionConfig, ErrorMode, PipelineKind};
use crate::encoder::{self, FIXED_PROFILE_MAX_RADIUS};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::lossless;
use crate::preprocess::{self, PreprocessState};
use crate::quantizer;
use crate::scalar::{Dtype, Scalar};
use crate::stream::{
    find_section, pack_sections, section, unpack_sections, Header, StageIds, StageParams,
    STAGE_BYPASSED,
};

use lr::EngineSections;

pub const PRED_BLOCKWISE: u8 = 0;
pub const PRED_LINEAR: u8 = 1;
pub const PRED_INTERP: u8 = 2;
pub const PRED_TRUNCATION: u8 = 3;

/// A decompressed grid whose element type was discovered from the stream.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGrid {
    F32(Grid<f32>),
    F64(Grid<f64>),
}

impl AnyGrid {
    pub fn dims(&self) -> &[usize] {
        match self {
            AnyGrid::F32(g) => g.dims(),
            AnyGrid::F64(g) => g.dims(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyGrid::F32(g) => g.len(),
            AnyGrid::F64(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            AnyGrid::F32(_) => Dtype::F32,
            AnyGrid::F64(_) => Dtype::F64,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Route {
    Blockwise,
    Linear,
    Interp,
    Truncation,
    IntegerEscape,
}

/// The blockwise composite stops at three dimensions; longer shapes run the
/// flat previous-value predictor over the linearized buffer.
fn dense_route(dims: &[usize]) -> Route {
    if dims.len() == 4 {
        Route::Linear
    } else {
        Route::Blockwise
    }
}

fn is_integer_valued<T: Scalar>(data: &[T]) -> bool {
    data.iter().all(|x| {
        let v = x.to_f64();
        x.is_finite_val() && v == v.round()
    })
}

/// Rotation that moves the slowest axis (typically time in stacked detector
/// frames) to the fastest position, so the flat pass walks along it.
fn rotate_perm(ndim: usize) -> Vec<u8> {
    let mut perm: Vec<u8> = (1..ndim as u8).collect();
    perm.push(0);
    perm
}

/// The escape-channel stack encodes with the fixed profile, whose code
/// lengths only reach 16384 bins either side of zero.
fn escape_radius(quant_radius: u32) -> u32 {
    quant_radius.min(FIXED_PROFILE_MAX_RADIUS)
}

fn stage_params(config: &CompressionConfig) -> StageParams {
    StageParams {
        block_size: config.block_size as u32,
        quant_radius: config.quant_radius,
        noise_coeff: config.noise_coeff,
        coefficient_eb_divisor: config.coefficient_eb_divisor,
        truncation_keep_bytes: match config.pipeline {
            PipelineKind::Truncation { keep_bytes } => keep_bytes,
            _ => 0,
        },
    }
}

fn dense_compress<S: Scalar>(
    route: Route,
    dims: &[usize],
    data: &[S],
    eb: f64,
    params: &StageParams,
) -> Result<(u8, EngineSections)> {
    match route {
        Route::Blockwise => Ok((PRED_BLOCKWISE, lr::compress_blockwise(dims, data, eb, params)?)),
        Route::Linear => Ok((PRED_LINEAR, lr::compress_linear(data, eb, params)?)),
        Route::Interp => {
            let flat = [data.len()];
            let engine_dims: &[usize] = if dims.len() == 4 { &flat } else { dims };
            Ok((PRED_INTERP, interp::compress(engine_dims, data, eb, params)?))
        }
        _ => unreachable!("dense_compress only handles dense routes"),
    }
}

pub fn compress<T: Scalar>(grid: &Grid<T>, config: &CompressionConfig) -> Result<Vec<u8>> {
    config.validate(T::BYTES)?;
    let dims = grid.dims();
    let params = stage_params(config);

    let route = match config.pipeline {
        PipelineKind::Truncation { .. } => Route::Truncation,
        PipelineKind::Lr => dense_route(dims),
        PipelineKind::Interp => Route::Interp,
        PipelineKind::Adaptive => {
            if !grid.is_empty() && config.error_bound < 0.5 && is_integer_valued(grid.data()) {
                Route::IntegerEscape
            } else {
                dense_route(dims)
            }
        }
    };

    let mut stages = StageIds {
        preprocessor: preprocess::KIND_NONE,
        predictor: match route {
            Route::Blockwise => PRED_BLOCKWISE,
            Route::Linear | Route::IntegerEscape => PRED_LINEAR,
            Route::Interp => PRED_INTERP,
            Route::Truncation => PRED_TRUNCATION,
        },
        quantizer: quantizer::KIND_LINEAR,
        encoder: encoder::KIND_DYNAMIC,
        lossless: config.lossless as u8,
    };

    let mut sections: Vec<(u8, Vec<u8>)> = Vec::new();
    if grid.is_empty() {
        // Nothing to decode: the header alone reproduces the empty grid.
        let header = Header {
            dtype: T::DTYPE,
            dims: dims.to_vec(),
            mode: config.mode,
            error_bound: config.error_bound,
            stages,
            params,
        };
        let mut out = Vec::new();
        header.write(&mut out);
        return Ok(out);
    }

    match route {
        Route::Truncation => {
            stages.quantizer = STAGE_BYPASSED;
            stages.encoder = STAGE_BYPASSED;
            sections.push((section::PREPROCESS, preprocess::save_state(&PreprocessState::None)));
            sections.push((section::RAW, truncation::compress(grid.data(), params.truncation_keep_bytes)));
        }
        Route::IntegerEscape => {
            let perm = rotate_perm(grid.ndim());
            let (_, transposed) = preprocess::transpose_forward(dims, grid.data(), &perm)?;
            let state = PreprocessState::Transpose { perm };
            let radius = escape_radius(config.quant_radius);
            let engine = lr::compress_linear_escape(&transposed, config.error_bound, radius)?;
            stages.preprocessor = preprocess::KIND_TRANSPOSE;
            stages.quantizer = quantizer::KIND_UNPRED_BITPLANE;
            stages.encoder = encoder::KIND_FIXED;
            sections.push((section::PREPROCESS, preprocess::save_state(&state)));
            sections.push((section::PREDICTOR, engine.predictor));
            sections.push((section::QUANTIZER, engine.quantizer));
            sections.push((section::ENCODER, engine.encoder));
        }
        dense => {
            let (pred_id, engine, state) = match config.mode {
                ErrorMode::Abs => {
                    let (id, engine) =
                        dense_compress::<T>(dense, dims, grid.data(), config.error_bound, &params)?;
                    (id, engine, PreprocessState::None)
                }
                ErrorMode::RelPointwise => {
                    // The engine runs in f64 regardless of the element type:
                    // log-domain values must not lose precision before
                    // quantization or the relative bound breaks.
                    let (values, state) = preprocess::log_forward::<T>(grid.data(), config.error_bound)?;
                    let PreprocessState::Log { abs_bound, .. } = state else { unreachable!() };
                    let (id, engine) = dense_compress::<f64>(dense, dims, &values, abs_bound, &params)?;
                    (id, engine, state)
                }
            };
            stages.predictor = pred_id;
            if config.mode == ErrorMode::RelPointwise {
                stages.preprocessor = preprocess::KIND_LOG;
            }
            sections.push((section::PREPROCESS, preprocess::save_state(&state)));
            sections.push((section::PREDICTOR, engine.predictor));
            sections.push((section::QUANTIZER, engine.quantizer));
            sections.push((section::ENCODER, engine.encoder));
        }
    }

    let header = Header {
        dtype: T::DTYPE,
        dims: dims.to_vec(),
        mode: config.mode,
        error_bound: config.error_bound,
        stages,
        params,
    };
    let mut out = Vec::new();
    header.write(&mut out);
    let bundle = pack_sections(&sections);
    out.extend_from_slice(&lossless::compress(&bundle, config.lossless, config.lossless_level)?);
    Ok(out)
}

fn run_engine<S: Scalar>(
    header: &Header,
    sections: &[(u8, Vec<u8>)],
    engine_dims: &[usize],
) -> Result<Vec<S>> {
    let predictor_sec = find_section(sections, section::PREDICTOR)?;
    let quantizer_sec = find_section(sections, section::QUANTIZER)?;
    let encoder_sec = find_section(sections, section::ENCODER)?;
    let params = &header.params;
    let n: usize = engine_dims.iter().product();
    match (header.stages.predictor, header.stages.quantizer) {
        (PRED_BLOCKWISE, quantizer::KIND_LINEAR) => {
            lr::decompress_blockwise(engine_dims, predictor_sec, quantizer_sec, encoder_sec, params)
        }
        (PRED_LINEAR, quantizer::KIND_LINEAR) => {
            lr::decompress_linear(n, quantizer_sec, encoder_sec, params)
        }
        (PRED_LINEAR, quantizer::KIND_UNPRED_BITPLANE) => {
            lr::decompress_linear_escape(n, quantizer_sec, encoder_sec, escape_radius(params.quant_radius))
        }
        (PRED_INTERP, quantizer::KIND_LINEAR) => {
            interp::decompress(engine_dims, predictor_sec, quantizer_sec, encoder_sec, params)
        }
        (p, q) => Err(Error::corrupt(
            "header",
            format!("no engine for predictor {p} with quantizer {q}"),
        )),
    }
}

fn decompress_typed<T: Scalar>(header: &Header, body: &[u8]) -> Result<Grid<T>> {
    let n: usize = header.dims.iter().product();
    if n == 0 {
        return Grid::new(header.dims.clone(), Vec::new());
    }

    if header.stages.predictor == PRED_TRUNCATION {
        let bundle = lossless::decompress(body)?;
        let sections = unpack_sections(&bundle)?;
        let payload = find_section(&sections, section::RAW)?;
        let data = truncation::decompress::<T>(payload, n, header.params.truncation_keep_bytes)?;
        return Grid::new(header.dims.clone(), data);
    }

    let bundle = lossless::decompress(body)?;
    let sections = unpack_sections(&bundle)?;
    let state = preprocess::load_state(find_section(&sections, section::PREPROCESS)?)?;
    let state_kind = match &state {
        PreprocessState::None => preprocess::KIND_NONE,
        PreprocessState::Log { .. } => preprocess::KIND_LOG,
        PreprocessState::Transpose { .. } => preprocess::KIND_TRANSPOSE,
    };
    if state_kind != header.stages.preprocessor {
        return Err(Error::corrupt(
            "preprocess",
            format!(
                "header declares preprocessor {}, section holds kind {state_kind}",
                header.stages.preprocessor
            ),
        ));
    }
    if (header.mode == ErrorMode::RelPointwise) != matches!(state, PreprocessState::Log { .. }) {
        return Err(Error::corrupt(
            "preprocess",
            "error mode and preprocess stage disagree".to_string(),
        ));
    }

    let flat = [n];
    match &state {
        PreprocessState::None => {
            let engine_dims: &[usize] =
                if header.dims.len() == 4 { &flat } else { &header.dims };
            let data = run_engine::<T>(header, &sections, engine_dims)?;
            Grid::new(header.dims.clone(), data)
        }
        PreprocessState::Log { .. } => {
            let engine_dims: &[usize] =
                if header.dims.len() == 4 { &flat } else { &header.dims };
            let values = run_engine::<f64>(header, &sections, engine_dims)?;
            let data = preprocess::log_inverse::<T>(&values, &state)?;
            Grid::new(header.dims.clone(), data)
        }
        PreprocessState::Transpose { perm } => {
            let data = run_engine::<T>(header, &sections, &flat)?;
            let transposed_dims: Vec<usize> =
                perm.iter().map(|&p| header.dims[p as usize]).collect();
            let (dims, restored) = preprocess::transpose_inverse(&transposed_dims, &data, perm)
                .map_err(|e| match e {
                    Error::Config(msg) => Error::corrupt("preprocess", msg),
                    other => other,
                })?;
            if dims != header.dims {
                return Err(Error::corrupt("preprocess", "transpose does not undo to header dims".to_string()));
            }
            Grid::new(dims, restored)
        }
    }
}

pub fn decompress(stream: &[u8]) -> Result<AnyGrid> {
    let (header, offset) = Header::parse(stream)?;
    let body = &stream[offset..];
    match header.dtype {
        Dtype::F32 => Ok(AnyGrid::F32(decompress_typed::<f32>(&header, body)?)),
        Dtype::F64 => Ok(AnyGrid::F64(decompress_typed::<f64>(&header, body)?)),
    }
}
