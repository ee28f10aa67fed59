//! Reversible stages in front of prediction: a log transform that converts
//! a pointwise relative bound into an absolute one, and an axis transpose
//! that reorders storage so the interesting axis becomes the fastest.

use crate::bytes::{put_f64, put_u64, ByteReader};
use crate::encoder::bitio::{pack_flags, unpack_flags};
use crate::error::{Error, Result};
use crate::grid::{Layout, MAX_DIMS};
use crate::scalar::{Dtype, Scalar};

pub const KIND_NONE: u8 = 0;
pub const KIND_LOG: u8 = 1;
pub const KIND_TRANSPOSE: u8 = 2;

/// Side information the inverse transform needs, carried as a stream section.
#[derive(Debug, Clone, PartialEq)]
pub enum PreprocessState {
    None,
    Log { abs_bound: f64, negative: Vec<bool>, zero: Vec<bool> },
    Transpose { perm: Vec<u8> },
}

/// Log-domain slack reserved for the rounding of ln/exp and the final cast
/// back to the element type, so the end-to-end relative error never exceeds
/// the requested bound. f32 output pays ~2^-24 relative on the final cast;
/// f64 pays only libm rounding of ln values up to ~710.
fn log_margin(dtype: Dtype) -> f64 {
    match dtype {
        Dtype::F32 => 1.5e-7,
        Dtype::F64 => 1e-12,
    }
}

/// Maps data to ln|x| (as f64, regardless of input precision) and returns
/// the absolute log-domain bound that guarantees the pointwise relative
/// bound `rel` after the inverse transform.
///
/// Signs move to a bitmap. Exact zeros move to a second bitmap and are
/// replaced by a sentinel two bounds below the smallest transformed value,
/// keeping the neighborhood smooth for the predictor while the bitmap, not
/// the sentinel's decoded value, restores them.
pub fn log_forward<T: Scalar>(data: &[T], rel: f64) -> Result<(Vec<f64>, PreprocessState)> {
    if !(rel.is_finite() && rel > 0.0) {
        return Err(Error::config(format!("relative bound must be positive, got {rel}")));
    }
    let margin = log_margin(T::DTYPE);
    let rel_eff = rel - margin * (1.0 + rel);
    if rel_eff <= 0.0 {
        return Err(Error::config(format!(
            "relative bound {rel} is below the precision floor {:.1e} of this element type",
            4.0 * margin
        )));
    }
    let abs_bound = rel_eff.ln_1p();

    let mut out = Vec::with_capacity(data.len());
    let mut negative = Vec::with_capacity(data.len());
    let mut zero = Vec::with_capacity(data.len());
    let mut min_transformed = f64::INFINITY;
    for (i, &x) in data.iter().enumerate() {
        if !x.is_finite_val() {
            return Err(Error::NonFinite { index: i });
        }
        let v = x.to_f64();
        negative.push(v.is_sign_negative());
        if v == 0.0 {
            zero.push(true);
            out.push(0.0); // placeholder, patched to the sentinel below
        } else {
            zero.push(false);
            let t = v.abs().ln();
            min_transformed = min_transformed.min(t);
            out.push(t);
        }
    }
    let sentinel = if min_transformed.is_finite() {
        min_transformed - 2.0 * abs_bound
    } else {
        -2.0 * abs_bound
    };
    for (t, &z) in out.iter_mut().zip(&zero) {
        if z {
            *t = sentinel;
        }
    }
    Ok((out, PreprocessState::Log { abs_bound, negative, zero }))
}

/// Inverse transform back to the element type. Zero-flagged elements are
/// restored exactly (including the sign of zero); everything else is
/// exp'd and re-signed.
pub fn log_inverse<T: Scalar>(values: &[f64], state: &PreprocessState) -> Result<Vec<T>> {
    let PreprocessState::Log { negative, zero, .. } = state else {
        return Err(Error::corrupt("preprocess", "log inverse given a non-log state"));
    };
    if negative.len() != values.len() || zero.len() != values.len() {
        return Err(Error::corrupt(
            "preprocess",
            format!("bitmaps cover {} elements, data has {}", negative.len(), values.len()),
        ));
    }
    Ok(values
        .iter()
        .zip(negative.iter().zip(zero))
        .map(|(&v, (&neg, &z))| {
            if z {
                T::from_f64(if neg { -0.0 } else { 0.0 })
            } else {
                let m = v.exp();
                T::from_f64(if neg { -m } else { m })
            }
        })
        .collect())
}

fn check_perm(perm: &[u8], ndim: usize) -> Result<()> {
    if perm.len() != ndim {
        return Err(Error::config(format!(
            "permutation {perm:?} does not match {ndim} axes"
        )));
    }
    let mut seen = [false; MAX_DIMS];
    for &p in perm {
        if p as usize >= ndim || seen[p as usize] {
            return Err(Error::config(format!("{perm:?} is not a permutation of the axes")));
        }
        seen[p as usize] = true;
    }
    Ok(())
}

/// Physically reorders `data` so that output axis k is input axis perm[k].
/// Returns the permuted dims alongside the moved data.
pub fn transpose_forward<T: Scalar>(
    dims: &[usize],
    data: &[T],
    perm: &[u8],
) -> Result<(Vec<usize>, Vec<T>)> {
    check_perm(perm, dims.len())?;
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p as usize]).collect();
    let in_layout = Layout::new(dims);
    let out_layout = Layout::new(&out_dims);
    let mut out = Vec::with_capacity(data.len());
    if data.is_empty() {
        return Ok((out_dims, out));
    }
    // Walk the output row-major and gather, so writes stay sequential.
    let mut idx = [0usize; MAX_DIMS];
    loop {
        let mut src = 0usize;
        for k in 0..dims.len() {
            src += idx[k] * in_layout.strides[perm[k] as usize];
        }
        out.push(data[src]);
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                debug_assert_eq!(out.len(), out_layout.len());
                return Ok((out_dims, out));
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < out_layout.dims[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Undoes `transpose_forward` given the same permutation.
pub fn transpose_inverse<T: Scalar>(
    out_dims: &[usize],
    data: &[T],
    perm: &[u8],
) -> Result<(Vec<usize>, Vec<T>)> {
    check_perm(perm, out_dims.len())?;
    let mut inverse = vec![0u8; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inverse[p as usize] = k as u8;
    }
    transpose_forward(out_dims, data, &inverse)
}

/// Section bytes for the state: kind byte, then kind-specific payload.
pub fn save_state(state: &PreprocessState) -> Vec<u8> {
    match state {
        PreprocessState::None => vec![KIND_NONE],
        PreprocessState::Log { abs_bound, negative, zero } => {
            let mut out = vec![KIND_LOG];
            put_f64(&mut out, *abs_bound);
            put_u64(&mut out, negative.len() as u64);
            out.extend_from_slice(&pack_flags(negative));
            out.extend_from_slice(&pack_flags(zero));
            out
        }
        PreprocessState::Transpose { perm } => {
            let mut out = vec![KIND_TRANSPOSE, perm.len() as u8];
            out.extend_from_slice(perm);
            out
        }
    }
}

pub fn load_state(bytes: &[u8]) -> Result<PreprocessState> {
    let mut r = ByteReader::new(bytes, "preprocess");
    let state = match r.u8()? {
        KIND_NONE => PreprocessState::None,
        KIND_LOG => {
            let abs_bound = r.f64()?;
            let n = r.count(0)?;
            let bitmap_bytes = n.div_ceil(8);
            let negative = unpack_flags(r.bytes(bitmap_bytes)?, n)?;
            let zero = unpack_flags(r.bytes(bitmap_bytes)?, n)?;
            PreprocessState::Log { abs_bound, negative, zero }
        }
        KIND_TRANSPOSE => {
            let ndim = r.u8()? as usize;
            if ndim == 0 || ndim > MAX_DIMS {
                return Err(Error::corrupt("preprocess", format!("bad axis count {ndim}")));
            }
            let perm = r.bytes(ndim)?.to_vec();
            check_perm(&perm, ndim)
                .map_err(|_| Error::corrupt("preprocess", format!("bad permutation {perm:?}")))?;
            PreprocessState::Transpose { perm }
        }
        other => return Err(Error::corrupt("preprocess", format!("unknown kind {other}"))),
    };
    r.expect_end()?;
    Ok(state)
}
