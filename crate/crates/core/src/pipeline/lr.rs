//! Prediction drivers built on the Lorenzo and regression predictors: the
//! blockwise composite that picks the better of the two per block, and a
//! flat previous-value driver for data treated as one long sequence.
//!
//! Compression keeps two views of the grid: the untouched original, which
//! feeds model fitting and selection, and a working copy where every element
//! is replaced by its decoded value the moment its code is emitted. All
//! neighbor reads go through the working copy, so the decompressor, which
//! only ever has decoded values, reproduces every prediction bit-for-bit.

use crate::bytes::{put_u64, ByteReader};
use crate::encoder::bitio::{pack_flags, unpack_flags};
use crate::encoder::{self, EncoderChoice};
use crate::error::{Error, Result};
use crate::grid::{blocks, for_each_index, index_iter, Layout, MAX_DIMS};
use crate::predictor::regression::{self, MAX_REGRESSION_DIMS};
use crate::predictor::{self, lorenzo, Choice};
use crate::quantizer::{
    LinearDequantizer, LinearQuantizer, UnpredAwareDequantizer, UnpredAwareQuantizer,
};
use crate::scalar::Scalar;
use crate::stream::StageParams;

/// Per-stage byte sections an engine produces for the stream bundle.
pub struct EngineSections {
    pub predictor: Vec<u8>,
    pub quantizer: Vec<u8>,
    pub encoder: Vec<u8>,
}

/// Regression coefficients are carried as deltas against the previous
/// regression block, all through one quantizer bound at eb/divisor. Slope
/// lanes are scaled down by the block side first, so their effective bound
/// tightens to eb/(divisor * block_size): a slope error is amplified by up
/// to block_size coordinate steps inside the block.
fn lane_scale(lane: usize, block_size: u32) -> f64 {
    if lane == 0 {
        1.0
    } else {
        1.0 / block_size as f64
    }
}

fn global_index(block_origin: &[usize; MAX_DIMS], local: &[usize; MAX_DIMS], ndim: usize) -> [usize; MAX_DIMS] {
    let mut g = [0usize; MAX_DIMS];
    for a in 0..ndim {
        g[a] = block_origin[a] + local[a];
    }
    g
}

pub fn compress_blockwise<S: Scalar>(
    dims: &[usize],
    data: &[S],
    eb: f64,
    params: &StageParams,
) -> Result<EngineSections> {
    let ndim = dims.len();
    if ndim > MAX_REGRESSION_DIMS {
        return Err(Error::config(format!(
            "blockwise prediction supports up to {MAX_REGRESSION_DIMS} dimensions, got {ndim}"
        )));
    }
    let layout = Layout::new(dims);
    let block_size = params.block_size as usize;
    let lanes = ndim + 1;

    let mut work = data.to_vec();
    let mut quant = LinearQuantizer::<S>::new(eb, params.quant_radius);
    let mut codes: Vec<u32> = Vec::with_capacity(data.len());
    let mut choices: Vec<bool> = Vec::new();

    let mut coeff_quant = LinearQuantizer::<f64>::new(eb / params.coefficient_eb_divisor, params.quant_radius);
    let mut coeff_codes: Vec<u32> = Vec::new();
    let mut prev_coeffs = [0.0f64; 4];

    for block in blocks(dims, block_size) {
        // Fit and compare candidates on original values only; blocks too
        // small to amortize the coefficient payload skip the fit entirely.
        let regression_fit = if block.len() > lanes {
            let coeffs = regression::fit_block(&block.extent, ndim, |local| {
                data[layout.flat(&global_index(&block.origin, local, ndim))].to_f64()
            });
            let est_l = predictor::estimate_lorenzo_error(data, &layout, &block, eb, params.noise_coeff);
            let est_r = predictor::estimate_regression_error(data, &layout, &block, &coeffs);
            (predictor::choose(est_l, est_r) == Choice::Regression).then_some(coeffs)
        } else {
            None
        };

        match regression_fit {
            Some(coeffs) => {
                choices.push(true);
                let mut decoded = [0.0f64; 4];
                for lane in 0..lanes {
                    let scale = lane_scale(lane, params.block_size);
                    let delta = (coeffs[lane] - prev_coeffs[lane]) / scale;
                    let (code, dec_delta) = coeff_quant.quantize(delta, 0.0);
                    coeff_codes.push(code);
                    decoded[lane] = prev_coeffs[lane] + dec_delta * scale;
                }
                prev_coeffs = decoded;
                for_each_index(&block.extent, ndim, |local| {
                    let flat = layout.flat(&global_index(&block.origin, local, ndim));
                    let pred = regression::predict(&decoded, local, ndim);
                    let (code, dec) = quant.quantize(data[flat], pred);
                    codes.push(code);
                    work[flat] = dec;
                });
            }
            None => {
                choices.push(false);
                for_each_index(&block.extent, ndim, |local| {
                    let g = global_index(&block.origin, local, ndim);
                    let flat = layout.flat(&g);
                    let pred = lorenzo::predict(&work, &layout, &g);
                    let (code, dec) = quant.quantize(data[flat], pred);
                    codes.push(code);
                    work[flat] = dec;
                });
            }
        }
    }

    let mut predictor_sec = Vec::new();
    put_u64(&mut predictor_sec, choices.len() as u64);
    predictor_sec.extend_from_slice(&pack_flags(&choices));
    if !coeff_codes.is_empty() {
        let coeff_enc = encoder::save_section(&coeff_codes, EncoderChoice::Dynamic)?;
        put_u64(&mut predictor_sec, coeff_enc.len() as u64);
        predictor_sec.extend_from_slice(&coeff_enc);
        predictor_sec.extend_from_slice(&coeff_quant.save());
    }

    Ok(EngineSections {
        predictor: predictor_sec,
        quantizer: quant.save(),
        encoder: encoder::save_section(&codes, EncoderChoice::Dynamic)?,
    })
}

pub fn decompress_blockwise<S: Scalar>(
    dims: &[usize],
    predictor_sec: &[u8],
    quantizer_sec: &[u8],
    encoder_sec: &[u8],
    params: &StageParams,
) -> Result<Vec<S>> {
    let ndim = dims.len();
    if ndim > MAX_REGRESSION_DIMS {
        return Err(Error::corrupt(
            "predictor",
            format!("blockwise prediction does not apply to {ndim} dimensions"),
        ));
    }
    let layout = Layout::new(dims);
    let n = layout.len();
    let block_size = params.block_size as usize;
    let lanes = ndim + 1;

    let mut r = ByteReader::new(predictor_sec, "predictor");
    let stored_blocks = r.u64()? as usize;
    let expected_blocks: usize = dims.iter().map(|d| d.div_ceil(block_size)).product();
    if stored_blocks != expected_blocks {
        return Err(Error::corrupt(
            "predictor",
            format!("stream has {stored_blocks} blocks, grid tiles into {expected_blocks}"),
        ));
    }
    let choices = unpack_flags(r.bytes(stored_blocks.div_ceil(8))?, stored_blocks)?;
    let regression_blocks = choices.iter().filter(|&&c| c).count();
    let (coeff_codes, mut coeff_dequant) = if regression_blocks > 0 {
        let enc_len = r.u64()? as usize;
        let enc_bytes = r.bytes(enc_len)?;
        let codes = encoder::load_section(enc_bytes, regression_blocks * lanes, params.quant_radius)?;
        let dequant = LinearDequantizer::<f64>::load(r.rest())?;
        (codes, Some(dequant))
    } else {
        r.expect_end()?;
        (Vec::new(), None)
    };

    let mut dequant = LinearDequantizer::<S>::load(quantizer_sec)?;
    let codes = encoder::load_section(encoder_sec, n, params.quant_radius)?;

    let mut work = vec![S::from_f64(0.0); n];
    let mut prev_coeffs = [0.0f64; 4];
    let mut coeff_cursor = 0usize;
    let mut cursor = 0usize;
    for (bi, block) in blocks(dims, block_size).enumerate() {
        if choices[bi] {
            let cd = coeff_dequant.as_mut().expect("choices imply a coefficient channel");
            let mut decoded = [0.0f64; 4];
            for lane in 0..lanes {
                let scale = lane_scale(lane, params.block_size);
                let dec_delta = cd.recover(coeff_codes[coeff_cursor], 0.0)?;
                coeff_cursor += 1;
                decoded[lane] = prev_coeffs[lane] + dec_delta * scale;
            }
            prev_coeffs = decoded;
            for local in index_iter(&block.extent, ndim) {
                let flat = layout.flat(&global_index(&block.origin, &local, ndim));
                let pred = regression::predict(&decoded, &local, ndim);
                work[flat] = dequant.recover(codes[cursor], pred)?;
                cursor += 1;
            }
        } else {
            for local in index_iter(&block.extent, ndim) {
                let g = global_index(&block.origin, &local, ndim);
                let flat = layout.flat(&g);
                let pred = lorenzo::predict(&work, &layout, &g);
                work[flat] = dequant.recover(codes[cursor], pred)?;
                cursor += 1;
            }
        }
    }
    Ok(work)
}

/// Flat previous-value driver: order-1 Lorenzo over the linearized buffer.
/// Carries no predictor side information at all.
pub fn compress_linear<S: Scalar>(data: &[S], eb: f64, params: &StageParams) -> Result<EngineSections> {
    let mut work = data.to_vec();
    let mut quant = LinearQuantizer::<S>::new(eb, params.quant_radius);
    let mut codes = Vec::with_capacity(data.len());
    for i in 0..data.len() {
        let pred = lorenzo::predict_linear(&work, i);
        let (code, dec) = quant.quantize(data[i], pred);
        codes.push(code);
        work[i] = dec;
    }
    Ok(EngineSections {
        predictor: Vec::new(),
        quantizer: quant.save(),
        encoder: encoder::save_section(&codes, EncoderChoice::Dynamic)?,
    })
}

pub fn decompress_linear<S: Scalar>(
    n: usize,
    quantizer_sec: &[u8],
    encoder_sec: &[u8],
    params: &StageParams,
) -> Result<Vec<S>> {
    let mut dequant = LinearDequantizer::<S>::load(quantizer_sec)?;
    let codes = encoder::load_section(encoder_sec, n, params.quant_radius)?;
    let mut work = Vec::with_capacity(n);
    for (i, &code) in codes.iter().enumerate() {
        let pred = lorenzo::predict_linear(&work, i);
        work.push(dequant.recover(code, pred)?);
    }
    Ok(work)
}

/// Flat previous-value driver over the escape-channel quantizer, used by
/// the near-lossless integer stack: bin half-width 1 keeps even residuals
/// on the linear path while odd ones take the exact bitplane escape.
pub fn compress_linear_escape<S: Scalar>(
    data: &[S],
    eb: f64,
    radius: u32,
) -> Result<EngineSections> {
    let mut work = data.to_vec();
    let mut quant = UnpredAwareQuantizer::<S>::new(eb, 1.0, radius);
    let mut codes = Vec::with_capacity(data.len());
    for i in 0..data.len() {
        let pred = lorenzo::predict_linear(&work, i);
        let (code, dec) = quant.quantize(data[i], pred, i)?;
        codes.push(code);
        work[i] = dec;
    }
    Ok(EngineSections {
        predictor: Vec::new(),
        quantizer: quant.save(),
        encoder: encoder::save_section(&codes, EncoderChoice::Fixed { radius })?,
    })
}

pub fn decompress_linear_escape<S: Scalar>(
    n: usize,
    quantizer_sec: &[u8],
    encoder_sec: &[u8],
    radius: u32,
) -> Result<Vec<S>> {
    let mut dequant = UnpredAwareDequantizer::<S>::load(quantizer_sec)?;
    let codes = encoder::load_section(encoder_sec, n, radius)?;
    let mut work = Vec::with_capacity(n);
    for (i, &code) in codes.iter().enumerate() {
        let pred = lorenzo::predict_linear(&work, i);
        work.push(dequant.recover(code, pred)?);
    }
    Ok(work)
}
