//! Element type abstraction so the whole pipeline is generic over f32/f64.

/// Element dtype tag as stored in the stream header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32 = 0,
    F64 = 1,
}

impl Dtype {
    pub fn size_bytes(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }

    pub fn from_byte(b: u8) -> Option<Dtype> {
        match b {
            0 => Some(Dtype::F32),
            1 => Some(Dtype::F64),
            _ => None,
        }
    }
}

/// Floating-point element of a grid. Implemented for f32 and f64 only.
///
/// All quantizer arithmetic happens in f64; `from_f64` is the single place
/// where the result is rounded back to the element's own precision, so both
/// the compressor and the decompressor reach bit-identical decoded values.
pub trait Scalar: Copy + PartialOrd + Send + Sync + 'static {
    const DTYPE: Dtype;
    const BYTES: usize;
    /// Number of IEEE-754 exponent bits, used by the byte-truncation pipeline.
    const EXPONENT_BITS: u32;

    fn to_f64(self) -> f64;
    fn from_f64(v: f64) -> Self;
    fn is_finite_val(self) -> bool;
    /// Raw IEEE bits widened to u64 (f32 occupies the low 32 bits).
    fn to_bits_u64(self) -> u64;
    fn from_bits_u64(bits: u64) -> Self;
    fn write_le(self, out: &mut Vec<u8>);
    /// Reads Self::BYTES little-endian bytes; caller guarantees the length.
    fn read_le(bytes: &[u8]) -> Self;
}

impl Scalar for f32 {
    const DTYPE: Dtype = Dtype::F32;
    const BYTES: usize = 4;
    const EXPONENT_BITS: u32 = 8;

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn is_finite_val(self) -> bool {
        self.is_finite()
    }

    fn to_bits_u64(self) -> u64 {
        self.to_bits() as u64
    }

    fn from_bits_u64(bits: u64) -> Self {
        f32::from_bits(bits as u32)
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes[..4].try_into().unwrap())
    }
}

impl Scalar for f64 {
    const DTYPE: Dtype = Dtype::F64;
    const BYTES: usize = 8;
    const EXPONENT_BITS: u32 = 11;

    fn to_f64(self) -> f64 {
        self
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn is_finite_val(self) -> bool {
        self.is_finite()
    }

    fn to_bits_u64(self) -> u64 {
        self.to_bits()
    }

    fn from_bits_u64(bits: u64) -> Self {
        f64::from_bits(bits)
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().unwrap())
    }
}
