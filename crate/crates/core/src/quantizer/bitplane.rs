//! Fixed-point residual coding: residuals are expressed in units of
//! 2^floor(log2(eb)) as sign + integer magnitude, then the magnitudes are
//! emitted as bitplanes from the most significant plane down. Truncating a
//! residual to this lattice loses strictly less than one lattice step, so
//! the reconstruction stays inside the bound; residuals that are already
//! lattice multiples (e.g. integers under eb < 0.5) reconstruct exactly.

use crate::encoder::bitio::{pack_flags, unpack_flags, BitWriter};
use crate::error::{Error, Result};

/// Sign-magnitude fixed-point value; the unit is implied by the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPoint {
    pub negative: bool,
    pub magnitude: u64,
}

/// Largest e with 2^e <= eb. The float log is nudged down if libm rounding
/// lands one step high, so the returned exponent never overshoots the bound.
pub fn exponent_for_bound(eb: f64) -> i32 {
    debug_assert!(eb.is_finite() && eb > 0.0);
    let mut e = eb.log2().floor() as i32;
    e = e.clamp(-1074, 1023);
    while e > -1074 && pow2(e) > eb {
        e -= 1;
    }
    e
}

/// Exact power of two; e must stay inside the f64 exponent range.
pub fn pow2(e: i32) -> f64 {
    debug_assert!((-1074..=1023).contains(&e));
    2.0f64.powi(e)
}

/// Nominal lattice mapping: magnitude = floor(|d| / 2^e).
///
/// Fails on non-finite residuals and on residuals needing more than 64
/// magnitude bits, which no supported pipeline can produce.
pub fn to_fixed(d: f64, exponent: i32) -> Result<FixedPoint> {
    if !d.is_finite() {
        return Err(Error::config("non-finite residual in fixed-point quantizer"));
    }
    let scaled = d.abs() / pow2(exponent);
    if !(scaled < 18446744073709551616.0) {
        return Err(Error::config(format!(
            "residual {d} needs more than 64 bitplanes at lattice exponent {exponent}"
        )));
    }
    Ok(FixedPoint { negative: d.is_sign_negative(), magnitude: scaled.floor() as u64 })
}

/// Reconstruction sign * magnitude * 2^e. Both sides of the codec call this
/// so decoded values match bit for bit.
pub fn from_fixed(fp: FixedPoint, exponent: i32) -> f64 {
    let r = fp.magnitude as f64 * pow2(exponent);
    if fp.negative {
        -r
    } else {
        r
    }
}

/// Serializes sign + magnitude planes: [K: u8][sign plane][planes MSB->LSB],
/// each plane ceil(n/8) bytes, bits MSB-first. K is the bit width of the
/// largest magnitude present (0 when all magnitudes are zero).
pub fn encode_planes(items: &[FixedPoint]) -> Vec<u8> {
    let width = items
        .iter()
        .map(|fp| 64 - fp.magnitude.leading_zeros())
        .max()
        .unwrap_or(0) as u8;
    let mut out = vec![width];
    out.extend_from_slice(&pack_flags(
        &items.iter().map(|fp| fp.negative).collect::<Vec<_>>(),
    ));
    for plane in (0..width).rev() {
        let mut w = BitWriter::new();
        for fp in items {
            w.write_bit((fp.magnitude >> plane) & 1 == 1);
        }
        out.extend_from_slice(&w.into_bytes());
    }
    out
}

pub fn decode_planes(bytes: &[u8], count: usize) -> Result<Vec<FixedPoint>> {
    if bytes.is_empty() {
        return Err(Error::corrupt("quantizer", "empty bitplane block"));
    }
    let width = bytes[0];
    if width > 64 {
        return Err(Error::corrupt("quantizer", format!("bitplane width {width} exceeds 64")));
    }
    let plane_bytes = count.div_ceil(8);
    let need = 1 + plane_bytes * (width as usize + 1);
    if bytes.len() < need {
        return Err(Error::corrupt(
            "quantizer",
            format!("bitplane block holds {} bytes, need {}", bytes.len(), need),
        ));
    }
    let signs = unpack_flags(&bytes[1..1 + plane_bytes], count)?;
    let mut items: Vec<FixedPoint> = signs
        .into_iter()
        .map(|negative| FixedPoint { negative, magnitude: 0 })
        .collect();
    for p in 0..width as usize {
        let start = 1 + (p + 1) * plane_bytes;
        let bits = unpack_flags(&bytes[start..start + plane_bytes], count)?;
        for (item, bit) in items.iter_mut().zip(bits) {
            item.magnitude = (item.magnitude << 1) | bit as u64;
        }
    }
    Ok(items)
}
