//! The on-disk container: a fixed self-describing header followed by one
//! losslessly wrapped bundle of tagged sections. The header alone carries
//! everything needed to rebuild the decompression pipeline; the sections
//! carry the per-stage payloads.

use crate::bytes::{put_f64, put_u16, put_u32, put_u64, ByteReader};
use crate::config::ErrorMode;
use crate::error::{Error, Result};
use crate::grid::MAX_DIMS;
use crate::scalar::Dtype;

pub const MAGIC: [u8; 4] = *b"MEBC";
pub const VERSION: u16 = 1;

/// A stage slot that carries no module (the stage was bypassed).
pub const STAGE_BYPASSED: u8 = 0xFF;

pub mod section {
    pub const PREPROCESS: u8 = 1;
    pub const PREDICTOR: u8 = 2;
    pub const QUANTIZER: u8 = 3;
    pub const ENCODER: u8 = 4;
    pub const RAW: u8 = 5;
}

/// Identifies the concrete module bound to each of the five stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageIds {
    pub preprocessor: u8,
    pub predictor: u8,
    pub quantizer: u8,
    pub encoder: u8,
    pub lossless: u8,
}

/// Knobs the decompressor needs verbatim from the compressing side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageParams {
    pub block_size: u32,
    pub quant_radius: u32,
    pub noise_coeff: f64,
    pub coefficient_eb_divisor: f64,
    pub truncation_keep_bytes: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub dtype: Dtype,
    pub dims: Vec<usize>,
    pub mode: ErrorMode,
    pub error_bound: f64,
    pub stages: StageIds,
    pub params: StageParams,
}

impl Header {
    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        put_u16(out, VERSION);
        out.push(self.dtype as u8);
        out.push(self.dims.len() as u8);
        for &d in &self.dims {
            put_u64(out, d as u64);
        }
        out.push(self.mode as u8);
        put_f64(out, self.error_bound);
        out.push(self.stages.preprocessor);
        out.push(self.stages.predictor);
        out.push(self.stages.quantizer);
        out.push(self.stages.encoder);
        out.push(self.stages.lossless);
        let mut params = Vec::new();
        put_u32(&mut params, self.params.block_size);
        put_u32(&mut params, self.params.quant_radius);
        put_f64(&mut params, self.params.noise_coeff);
        put_f64(&mut params, self.params.coefficient_eb_divisor);
        params.push(self.params.truncation_keep_bytes);
        put_u32(out, params.len() as u32);
        out.extend_from_slice(&params);
    }

    /// Parses the header and returns it with the offset of the first byte
    /// after it, where the lossless bundle begins.
    pub fn parse(buf: &[u8]) -> Result<(Header, usize)> {
        let mut r = ByteReader::new(buf, "header");
        let magic = r.bytes(4)?;
        if magic != MAGIC {
            return Err(Error::corrupt("header", format!("bad magic {magic:02x?}")));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::corrupt("header", format!("unsupported version {version}")));
        }
        let dtype_byte = r.u8()?;
        let dtype = Dtype::from_byte(dtype_byte)
            .ok_or_else(|| Error::corrupt("header", format!("unknown dtype {dtype_byte}")))?;
        let ndim = r.u8()? as usize;
        if ndim == 0 || ndim > MAX_DIMS {
            return Err(Error::corrupt("header", format!("bad dimension count {ndim}")));
        }
        let mut dims = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            let d = r.u64()?;
            if d > usize::MAX as u64 {
                return Err(Error::corrupt("header", format!("extent {d} too large")));
            }
            dims.push(d as usize);
        }
        if dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).is_none() {
            return Err(Error::corrupt("header", "element count overflows".to_string()));
        }
        let mode = match r.u8()? {
            0 => ErrorMode::Abs,
            1 => ErrorMode::RelPointwise,
            other => return Err(Error::corrupt("header", format!("unknown error mode {other}"))),
        };
        let error_bound = r.f64()?;
        if !(error_bound.is_finite() && error_bound > 0.0) {
            return Err(Error::corrupt("header", format!("bad error bound {error_bound}")));
        }
        let stages = StageIds {
            preprocessor: r.u8()?,
            predictor: r.u8()?,
            quantizer: r.u8()?,
            encoder: r.u8()?,
            lossless: r.u8()?,
        };
        let param_len = r.u32()? as usize;
        let mut pr = ByteReader::new(r.bytes(param_len)?, "header params");
        let params = StageParams {
            block_size: pr.u32()?,
            quant_radius: pr.u32()?,
            noise_coeff: pr.f64()?,
            coefficient_eb_divisor: pr.f64()?,
            truncation_keep_bytes: pr.u8()?,
        };
        pr.expect_end()?;
        let consumed = buf.len() - r.remaining();
        Ok((Header { dtype, dims, mode, error_bound, stages, params }, consumed))
    }
}

/// Serializes tagged sections into one contiguous bundle.
pub fn pack_sections(sections: &[(u8, Vec<u8>)]) -> Vec<u8> {
    let total: usize = sections.iter().map(|(_, p)| 9 + p.len()).sum();
    let mut out = Vec::with_capacity(total);
    for (tag, payload) in sections {
        out.push(*tag);
        put_u64(&mut out, payload.len() as u64);
        out.extend_from_slice(payload);
    }
    out
}

/// Splits a bundle back into tagged sections, validating tags and lengths.
pub fn unpack_sections(bundle: &[u8]) -> Result<Vec<(u8, Vec<u8>)>> {
    let mut r = ByteReader::new(bundle, "section bundle");
    let mut out = Vec::new();
    while r.remaining() > 0 {
        let tag = r.u8()?;
        if !(section::PREPROCESS..=section::RAW).contains(&tag) {
            return Err(Error::corrupt("section bundle", format!("unknown section tag {tag}")));
        }
        let len = r.count(1)?;
        out.push((tag, r.bytes(len)?.to_vec()));
    }
    Ok(out)
}

/// Finds the single section with the given tag.
pub fn find_section<'a>(sections: &'a [(u8, Vec<u8>)], tag: u8) -> Result<&'a [u8]> {
    sections
        .iter()
        .find(|(t, _)| *t == tag)
        .map(|(_, p)| p.as_slice())
        .ok_or_else(|| Error::corrupt("section bundle", format!("missing section tag {tag}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_header() -> Header {
        Header {
            dtype: Dtype::F32,
            dims: vec![16, 8, 4],
            mode: ErrorMode::Abs,
            error_bound: 1e-3,
            stages: StageIds {
                preprocessor: 0,
                predictor: 0,
                quantizer: 0,
                encoder: 0,
                lossless: 1,
            },
            params: StageParams {
                block_size: 6,
                quant_radius: 32768,
                noise_coeff: 0.5,
                coefficient_eb_divisor: 2.0,
                truncation_keep_bytes: 0,
            },
        }
    }

    #[test]
    fn header_round_trips_and_reports_its_length() {
        let h = sample_header();
        let mut buf = Vec::new();
        h.write(&mut buf);
        buf.extend_from_slice(b"bundle follows");
        let (parsed, consumed) = Header::parse(&buf).unwrap();
        assert_eq!(parsed, h);
        assert_eq!(&buf[consumed..], b"bundle follows");
    }

    #[test]
    fn bad_magic_version_and_truncation_are_corruption() {
        let h = sample_header();
        let mut buf = Vec::new();
        h.write(&mut buf);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(Header::parse(&bad).is_err());

        let mut bad = buf.clone();
        bad[4] = 42; // version
        assert!(Header::parse(&bad).is_err());

        assert!(Header::parse(&buf[..12]).is_err());

        let mut bad = buf.clone();
        bad[6] = 9; // dtype byte
        assert!(Header::parse(&bad).is_err());
    }

    #[test]
    fn rejects_zero_and_excess_dimension_counts() {
        let h = sample_header();
        let mut buf = Vec::new();
        h.write(&mut buf);
        let mut bad = buf.clone();
        bad[7] = 0;
        assert!(Header::parse(&bad).is_err());
        bad[7] = 5;
        assert!(Header::parse(&bad).is_err());
    }

    #[test]
    fn sections_round_trip_in_order() {
        let sections = vec![
            (section::PREPROCESS, vec![0u8]),
            (section::QUANTIZER, vec![1, 2, 3, 4, 5]),
            (section::ENCODER, Vec::new()),
        ];
        let bundle = pack_sections(&sections);
        let back = unpack_sections(&bundle).unwrap();
        assert_eq!(back, sections);
        assert_eq!(find_section(&back, section::QUANTIZER).unwrap(), &[1, 2, 3, 4, 5]);
        assert!(find_section(&back, section::RAW).is_err());
    }

    #[test]
    fn damaged_bundles_are_corruption() {
        let sections = vec![(section::ENCODER, vec![9u8; 40])];
        let bundle = pack_sections(&sections);

        let mut bad = bundle.clone();
        bad[0] = 99; // unknown tag
        assert!(unpack_sections(&bad).is_err());

        let mut bad = bundle.clone();
        bad.truncate(20); // payload shorter than its declared length
        assert!(unpack_sections(&bad).is_err());

        let mut bad = bundle;
        bad[5] = 0xFF; // length field claims far more than present
        assert!(unpack_sections(&bad).is_err());
    }
}
