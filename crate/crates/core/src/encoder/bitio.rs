//! MSB-first bit packing shared by the entropy coder, choice bitmaps and
//! bitplanes. Bit 0 of a stream is the most significant bit of byte 0.

use crate::error::{Error, Result};

#[derive(Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    /// Bits already written into the last byte, 0..8.
    fill: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        BitWriter::default()
    }

    pub fn write_bit(&mut self, bit: bool) {
        if self.fill == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.last_mut().unwrap();
            *last |= 1 << (7 - self.fill);
        }
        self.fill = (self.fill + 1) % 8;
    }

    /// Writes the low `n` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 64);
        for i in (0..n).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    pub fn bit_len(&self) -> u64 {
        if self.fill == 0 {
            self.bytes.len() as u64 * 8
        } else {
            (self.bytes.len() as u64 - 1) * 8 + self.fill as u64
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

pub struct BitReader<'a> {
    bytes: &'a [u8],
    bit_len: u64,
    pos: u64,
}

impl<'a> BitReader<'a> {
    /// `bit_len` may be smaller than 8 * bytes.len(); reading past it is a
    /// corruption error, never an out-of-bounds access.
    pub fn new(bytes: &'a [u8], bit_len: u64) -> Result<Self> {
        if bit_len > bytes.len() as u64 * 8 {
            return Err(Error::corrupt(
                "bitstream",
                format!("declared {} bits but only {} bytes present", bit_len, bytes.len()),
            ));
        }
        Ok(BitReader { bytes, bit_len, pos: 0 })
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.bit_len {
            return Err(Error::corrupt("bitstream", "read past end of bitstream"));
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = (byte >> (7 - (self.pos % 8))) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 64);
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn remaining(&self) -> u64 {
        self.bit_len - self.pos
    }
}

/// Packs one bit per flag, MSB-first.
pub fn pack_flags(flags: &[bool]) -> Vec<u8> {
    let mut w = BitWriter::new();
    for &f in flags {
        w.write_bit(f);
    }
    w.into_bytes()
}

/// Unpacks `count` flags; `bytes` must hold at least ceil(count/8) bytes.
pub fn unpack_flags(bytes: &[u8], count: usize) -> Result<Vec<bool>> {
    let mut r = BitReader::new(bytes, bytes.len() as u64 * 8)?;
    if (count as u64) > r.remaining() {
        return Err(Error::corrupt("bitstream", "flag bitmap shorter than declared count"));
    }
    (0..count).map(|_| r.read_bit()).collect()
}
