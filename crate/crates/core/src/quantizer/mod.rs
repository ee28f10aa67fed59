//! Quantization stage: maps per-element prediction residuals to small
//! integer codes and guarantees, element by element, that the decoded value
//! stays within the error bound of the original.
//!
//! Codes live in [0, 2R): code R+q encodes quantized residual q, code 0
//! flags an element the integer path could not bound, handled by a side
//! channel. Both quantizers re-check the bound on the decoded value after
//! rounding to the grid's own precision; that check, not the nominal
//! formula, is what makes the bound unconditional.

pub mod bitplane;

use crate::bytes::{put_f64, put_u32, put_u64, ByteReader};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use bitplane::FixedPoint;

pub const KIND_LINEAR: u8 = 0;
pub const KIND_UNPRED_BITPLANE: u8 = 1;

/// Shared by compressor and decompressor so decoded values are bit-identical.
#[inline]
fn decode_bin<T: Scalar>(pred: f64, q: f64, bin_halfwidth: f64) -> T {
    T::from_f64(pred + 2.0 * bin_halfwidth * q)
}

/// Classic linear-scaling quantizer: residual bins of width 2*eb,
/// out-of-range or bound-breaking elements stored verbatim.
pub struct LinearQuantizer<T> {
    eb: f64,
    radius: u32,
    unpredictable: Vec<T>,
}

impl<T: Scalar> LinearQuantizer<T> {
    pub fn new(eb: f64, radius: u32) -> Self {
        assert!(eb > 0.0 && eb.is_finite());
        LinearQuantizer { eb, radius, unpredictable: Vec::new() }
    }

    /// Returns (code, decoded). The decoded value is what the decompressor
    /// will reproduce and must be substituted into the working buffer so
    /// later predictions see it.
    pub fn quantize(&mut self, orig: T, pred: f64) -> (u32, T) {
        let o = orig.to_f64();
        if orig.is_finite_val() && pred.is_finite() {
            let q = ((o - pred) / (2.0 * self.eb)).round();
            if q.abs() < self.radius as f64 {
                let decoded: T = decode_bin(pred, q, self.eb);
                if (decoded.to_f64() - o).abs() <= self.eb {
                    return ((self.radius as i64 + q as i64) as u32, decoded);
                }
            }
        }
        self.unpredictable.push(orig);
        (0, orig)
    }

    /// Section bytes: kind, eb, radius, count, raw values.
    pub fn save(&self) -> Vec<u8> {
        let mut out = vec![KIND_LINEAR];
        put_f64(&mut out, self.eb);
        put_u32(&mut out, self.radius);
        put_u64(&mut out, self.unpredictable.len() as u64);
        for &v in &self.unpredictable {
            v.write_le(&mut out);
        }
        out
    }
}

/// Decoder counterpart of `LinearQuantizer`.
pub struct LinearDequantizer<T> {
    eb: f64,
    radius: u32,
    unpredictable: Vec<T>,
    cursor: usize,
}

impl<T: Scalar> LinearDequantizer<T> {
    pub fn load(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes, "quantizer");
        let kind = r.u8()?;
        if kind != KIND_LINEAR {
            return Err(Error::corrupt("quantizer", format!("expected linear kind, got {kind}")));
        }
        let eb = r.f64()?;
        if !(eb.is_finite() && eb > 0.0) {
            return Err(Error::corrupt("quantizer", format!("invalid bound {eb}")));
        }
        let radius = r.u32()?;
        let count = r.count(T::BYTES)?;
        let mut unpredictable = Vec::with_capacity(count);
        for _ in 0..count {
            unpredictable.push(T::read_le(r.bytes(T::BYTES)?));
        }
        r.expect_end()?;
        Ok(LinearDequantizer { eb, radius, unpredictable, cursor: 0 })
    }

    pub fn recover(&mut self, code: u32, pred: f64) -> Result<T> {
        if code == 0 {
            let v = self.unpredictable.get(self.cursor).copied().ok_or_else(|| {
                Error::corrupt("quantizer", "more escape codes than stored values")
            })?;
            self.cursor += 1;
            return Ok(v);
        }
        if code >= 2 * self.radius {
            return Err(Error::corrupt("quantizer", format!("code {code} outside radius {}", self.radius)));
        }
        let q = code as i64 - self.radius as i64;
        Ok(decode_bin(pred, q as f64, self.eb))
    }
}

/// Linear quantizer whose escape channel stores residuals in sign-magnitude
/// fixed point (bitplanes) instead of verbatim values. The bin half-width
/// may differ from the bound: the integer stack uses bins of width 2 with a
/// sub-0.5 bound, which makes both paths exact on integer data.
pub struct UnpredAwareQuantizer<T> {
    bound: f64,
    bin_halfwidth: f64,
    radius: u32,
    exponent: i32,
    escaped: Vec<FixedPoint>,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Scalar> UnpredAwareQuantizer<T> {
    pub fn new(bound: f64, bin_halfwidth: f64, radius: u32) -> Self {
        assert!(bound > 0.0 && bound.is_finite());
        assert!(bin_halfwidth > 0.0 && bin_halfwidth.is_finite());
        UnpredAwareQuantizer {
            bound,
            bin_halfwidth,
            radius,
            exponent: bitplane::exponent_for_bound(bound),
            escaped: Vec::new(),
            _marker: std::marker::PhantomData,
        }
    }

    /// `index` is the element's flat position, used only for diagnostics:
    /// unlike the verbatim channel, fixed point cannot absorb NaN/Inf.
    pub fn quantize(&mut self, orig: T, pred: f64, index: usize) -> Result<(u32, T)> {
        if !orig.is_finite_val() {
            return Err(Error::NonFinite { index });
        }
        let o = orig.to_f64();
        if pred.is_finite() {
            let q = ((o - pred) / (2.0 * self.bin_halfwidth)).round();
            if q.abs() < self.radius as f64 {
                let decoded: T = decode_bin(pred, q, self.bin_halfwidth);
                if (decoded.to_f64() - o).abs() <= self.bound {
                    return Ok(((self.radius as i64 + q as i64) as u32, decoded));
                }
            }
        }
        let d = o - pred;
        let nominal = bitplane::to_fixed(d, self.exponent)?;
        let base = if nominal.negative {
            -(nominal.magnitude as i128)
        } else {
            nominal.magnitude as i128
        };
        // Truncation pulls the reconstruction toward zero, so the first
        // alternative steps back toward the residual. The extra candidates
        // only matter when float rounding near the target's precision limit
        // breaks the nominal step.
        let toward: i128 = if d >= 0.0 { 1 } else { -1 };
        for delta in [0, toward, -toward, 2 * toward, -2 * toward] {
            let k = base + delta;
            let fp = FixedPoint { negative: k < 0, magnitude: k.unsigned_abs().try_into().unwrap_or(u64::MAX) };
            let decoded = T::from_f64(pred + bitplane::from_fixed(fp, self.exponent));
            if (decoded.to_f64() - o).abs() <= self.bound {
                self.escaped.push(fp);
                return Ok((0, decoded));
            }
        }
        Err(Error::config(format!(
            "element at flat index {index} cannot be bounded by the fixed-point channel"
        )))
    }

    /// Section bytes: kind, bound, radius, count, bin half-width, planes.
    pub fn save(&self) -> Vec<u8> {
        let mut out = vec![KIND_UNPRED_BITPLANE];
        put_f64(&mut out, self.bound);
        put_u32(&mut out, self.radius);
        put_u64(&mut out, self.escaped.len() as u64);
        put_f64(&mut out, self.bin_halfwidth);
        out.extend_from_slice(&bitplane::encode_planes(&self.escaped));
        out
    }
}

pub struct UnpredAwareDequantizer<T> {
    bin_halfwidth: f64,
    radius: u32,
    exponent: i32,
    escaped: Vec<FixedPoint>,
    cursor: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Scalar> UnpredAwareDequantizer<T> {
    pub fn load(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes, "quantizer");
        let kind = r.u8()?;
        if kind != KIND_UNPRED_BITPLANE {
            return Err(Error::corrupt("quantizer", format!("expected bitplane kind, got {kind}")));
        }
        let bound = r.f64()?;
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::corrupt("quantizer", format!("invalid bound {bound}")));
        }
        let radius = r.u32()?;
        let count = r.count(0)?;
        let bin_halfwidth = r.f64()?;
        if !(bin_halfwidth.is_finite() && bin_halfwidth > 0.0) {
            return Err(Error::corrupt("quantizer", format!("invalid bin width {bin_halfwidth}")));
        }
        let escaped = bitplane::decode_planes(r.rest(), count)?;
        Ok(UnpredAwareDequantizer {
            bin_halfwidth,
            radius,
            exponent: bitplane::exponent_for_bound(bound),
            escaped,
            cursor: 0,
            _marker: std::marker::PhantomData,
        })
    }

    pub fn recover(&mut self, code: u32, pred: f64) -> Result<T> {
        if code == 0 {
            let fp = self.escaped.get(self.cursor).copied().ok_or_else(|| {
                Error::corrupt("quantizer", "more escape codes than stored residuals")
            })?;
            self.cursor += 1;
            return Ok(T::from_f64(pred + bitplane::from_fixed(fp, self.exponent)));
        }
        if code >= 2 * self.radius {
            return Err(Error::corrupt("quantizer", format!("code {code} outside radius {}", self.radius)));
        }
        let q = code as i64 - self.radius as i64;
        Ok(decode_bin(pred, q as f64, self.bin_halfwidth))
    }
}
