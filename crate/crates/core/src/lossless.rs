//! Final lossless stage over the bundled sections. Backends are
//! byte-oriented and oblivious to what they wrap: identity passthrough and
//! a DEFLATE-class general-purpose codec.

use crate::bytes::{put_u64, ByteReader};
use crate::config::LosslessKind;
use crate::error::{Error, Result};
use flate2::read::ZlibDecoder;
use flate2::write::ZlibEncoder;
use flate2::Compression;
use std::io::{Read, Write};

/// Wraps `raw` as: backend id, level, raw size u64, compressed size u64,
/// payload. Passthrough stores the bytes as-is with equal sizes.
pub fn compress(raw: &[u8], kind: LosslessKind, level: u8) -> Result<Vec<u8>> {
    let payload = match kind {
        LosslessKind::Passthrough => raw.to_vec(),
        LosslessKind::DeflateClass => {
            let mut enc = ZlibEncoder::new(Vec::new(), Compression::new(level.min(9) as u32));
            enc.write_all(raw).map_err(|e| Error::config(format!("deflate failed: {e}")))?;
            enc.finish().map_err(|e| Error::config(format!("deflate failed: {e}")))?
        }
    };
    let mut out = vec![kind as u8, level];
    put_u64(&mut out, raw.len() as u64);
    put_u64(&mut out, payload.len() as u64);
    out.extend_from_slice(&payload);
    Ok(out)
}

/// Inverse of `compress`; validates both recorded sizes.
pub fn decompress(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut r = ByteReader::new(bytes, "lossless");
    let kind = LosslessKind::from_byte(r.u8()?)
        .ok_or_else(|| Error::corrupt("lossless", "unknown backend id"))?;
    let _level = r.u8()?;
    let raw_size = r.u64()?;
    let comp_size = r.u64()?;
    let payload = r.rest();
    if payload.len() as u64 != comp_size {
        return Err(Error::corrupt(
            "lossless",
            format!("payload is {} bytes, header says {}", payload.len(), comp_size),
        ));
    }
    if raw_size > (1u64 << 40) {
        return Err(Error::corrupt("lossless", format!("implausible raw size {raw_size}")));
    }
    let raw = match kind {
        LosslessKind::Passthrough => {
            if raw_size != comp_size {
                return Err(Error::corrupt("lossless", "passthrough sizes disagree"));
            }
            payload.to_vec()
        }
        LosslessKind::DeflateClass => {
            // The format cannot expand beyond ~1032:1, so a recorded raw
            // size far past that is a lie; and the allocation hint is
            // capped so a corrupt header cannot demand memory up front.
            if raw_size > comp_size.saturating_mul(1040).saturating_add(64) {
                return Err(Error::corrupt(
                    "lossless",
                    format!("raw size {raw_size} impossible from {comp_size} compressed bytes"),
                ));
            }
            let mut out = Vec::with_capacity(raw_size.min(1 << 20) as usize);
            let mut dec = ZlibDecoder::new(payload).take(raw_size + 1);
            dec.read_to_end(&mut out)
                .map_err(|e| Error::corrupt("lossless", format!("inflate failed: {e}")))?;
            out
        }
    };
    if raw.len() as u64 != raw_size {
        return Err(Error::corrupt(
            "lossless",
            format!("decompressed to {} bytes, header says {}", raw.len(), raw_size),
        ));
    }
    Ok(raw)
}
