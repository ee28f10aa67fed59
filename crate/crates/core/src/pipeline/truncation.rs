//! Byte truncation: keep the `k` most significant big-endian bytes of each
//! element's bit pattern and zero-fill the rest on reconstruction. There is
//! no residual coding at all, so throughput is essentially memory speed; the
//! precision loss is set by k (everything below the kept prefix is dropped),
//! independent of any requested error bound. Keeping all bytes is lossless.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn compress<T: Scalar>(data: &[T], keep_bytes: u8) -> Vec<u8> {
    let keep = keep_bytes as usize;
    let mut out = Vec::with_capacity(data.len() * keep);
    for &x in data {
        let be = x.to_bits_u64().to_be_bytes();
        out.extend_from_slice(&be[8 - T::BYTES..8 - T::BYTES + keep]);
    }
    out
}

pub fn decompress<T: Scalar>(payload: &[u8], n: usize, keep_bytes: u8) -> Result<Vec<T>> {
    let keep = keep_bytes as usize;
    if keep == 0 || keep > T::BYTES {
        return Err(Error::corrupt(
            "raw payload",
            format!("keep width {keep} outside 1..={}", T::BYTES),
        ));
    }
    if payload.len() != n * keep {
        return Err(Error::corrupt(
            "raw payload",
            format!("{} bytes cannot hold {n} elements of {keep} kept bytes", payload.len()),
        ));
    }
    let mut out = Vec::with_capacity(n);
    for chunk in payload.chunks_exact(keep) {
        let mut be = [0u8; 8];
        be[8 - T::BYTES..8 - T::BYTES + keep].copy_from_slice(chunk);
        out.push(T::from_bits_u64(u64::from_be_bytes(be)));
    }
    Ok(out)
}
