//! User-facing compression configuration and its validation.

use crate::error::{Error, Result};

/// How the error bound is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMode {
    /// |decompressed - original| <= bound for every element.
    Abs = 0,
    /// |decompressed - original| / |original| <= bound for every nonzero
    /// element; exact zeros are reproduced exactly. Implemented as a log
    /// transform in front of an absolute-bound pipeline.
    RelPointwise = 1,
}

impl ErrorMode {
    pub fn from_byte(b: u8) -> Option<ErrorMode> {
        match b {
            0 => Some(ErrorMode::Abs),
            1 => Some(ErrorMode::RelPointwise),
            _ => None,
        }
    }
}

/// Which compression strategy drives the stage stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineKind {
    /// Blockwise choice between Lorenzo and linear regression per block.
    Lr,
    /// Multilevel interpolation prediction over the whole grid.
    Interp,
    /// Keep the `keep_bytes` most significant bytes of each element.
    Truncation { keep_bytes: u8 },
    /// Inspect the data and pick a stack: integer-valued data under a tight
    /// absolute bound routes to a lossless integer stack, everything else
    /// to the blockwise Lorenzo/regression stack.
    Adaptive,
}

/// Lossless back end applied to the bundled sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LosslessKind {
    Passthrough = 0,
    DeflateClass = 1,
}

impl LosslessKind {
    pub fn from_byte(b: u8) -> Option<LosslessKind> {
        match b {
            0 => Some(LosslessKind::Passthrough),
            1 => Some(LosslessKind::DeflateClass),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CompressionConfig {
    pub mode: ErrorMode,
    /// Absolute bound (Abs) or pointwise relative bound (RelPointwise).
    pub error_bound: f64,
    pub pipeline: PipelineKind,
    /// Side length of the cubes the blockwise pipeline tiles the grid into.
    pub block_size: usize,
    /// Quantizer radius R; codes live in [0, 2R), code 0 marks unpredictable.
    pub quant_radius: u32,
    /// Weight of the decompression-noise term in the Lorenzo block-error
    /// estimate (each causal neighbor may already be off by up to eb).
    pub noise_coeff: f64,
    /// Regression coefficient storage precision: intercept deltas are bound
    /// by eb/d, slope deltas by eb/(d * block_size).
    pub coefficient_eb_divisor: f64,
    pub lossless: LosslessKind,
    pub lossless_level: u8,
}

impl CompressionConfig {
    pub fn new(mode: ErrorMode, error_bound: f64, pipeline: PipelineKind) -> Self {
        let lossless = match pipeline {
            PipelineKind::Truncation { .. } => LosslessKind::Passthrough,
            _ => LosslessKind::DeflateClass,
        };
        CompressionConfig {
            mode,
            error_bound,
            pipeline,
            block_size: 6,
            quant_radius: 32768,
            noise_coeff: 0.5,
            coefficient_eb_divisor: 2.0,
            lossless,
            lossless_level: 6,
        }
    }

    /// `element_bytes` is the size of the grid's element type, needed to
    /// range-check truncation's keep count.
    pub fn validate(&self, element_bytes: usize) -> Result<()> {
        if !(self.error_bound.is_finite() && self.error_bound > 0.0) {
            return Err(Error::config(format!(
                "error bound must be finite and positive, got {}",
                self.error_bound
            )));
        }
        if self.block_size == 0 {
            return Err(Error::config("block size must be positive"));
        }
        if self.quant_radius < 1 || self.quant_radius > (1 << 30) {
            return Err(Error::config(format!(
                "quantizer radius must be in [1, 2^30], got {}",
                self.quant_radius
            )));
        }
        if !(self.noise_coeff.is_finite() && self.noise_coeff >= 0.0) {
            return Err(Error::config("noise coefficient must be finite and non-negative"));
        }
        if !(self.coefficient_eb_divisor.is_finite() && self.coefficient_eb_divisor > 0.0) {
            return Err(Error::config("coefficient bound divisor must be positive"));
        }
        match self.pipeline {
            PipelineKind::Truncation { keep_bytes } => {
                if keep_bytes == 0 || keep_bytes as usize > element_bytes {
                    return Err(Error::config(format!(
                        "truncation must keep between 1 and {} bytes, got {}",
                        element_bytes, keep_bytes
                    )));
                }
                if self.mode == ErrorMode::RelPointwise {
                    return Err(Error::config(
                        "truncation does not honor a relative bound; use mode ABS",
                    ));
                }
            }
            PipelineKind::Adaptive => {
                if self.mode == ErrorMode::RelPointwise {
                    return Err(Error::config(
                        "adaptive selection is defined for mode ABS only",
                    ));
                }
            }
            PipelineKind::Lr | PipelineKind::Interp => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_bound() {
        let mut c = CompressionConfig::new(ErrorMode::Abs, 0.0, PipelineKind::Lr);
        assert!(c.validate(4).is_err());
        c.error_bound = f64::NAN;
        assert!(c.validate(4).is_err());
        c.error_bound = 1e-3;
        assert!(c.validate(4).is_ok());
    }

    #[test]
    fn rejects_truncation_keep_out_of_range() {
        let c = CompressionConfig::new(ErrorMode::Abs, 1.0, PipelineKind::Truncation { keep_bytes: 5 });
        assert!(c.validate(4).is_err());
        assert!(c.validate(8).is_ok());
        let c0 = CompressionConfig::new(ErrorMode::Abs, 1.0, PipelineKind::Truncation { keep_bytes: 0 });
        assert!(c0.validate(4).is_err());
    }

    #[test]
    fn rejects_rel_mode_for_truncation_and_adaptive() {
        let t = CompressionConfig::new(
            ErrorMode::RelPointwise,
            0.1,
            PipelineKind::Truncation { keep_bytes: 2 },
        );
        assert!(t.validate(4).is_err());
        let a = CompressionConfig::new(ErrorMode::RelPointwise, 0.1, PipelineKind::Adaptive);
        assert!(a.validate(4).is_err());
    }

    #[test]
    fn truncation_defaults_to_passthrough_lossless() {
        let t = CompressionConfig::new(ErrorMode::Abs, 1.0, PipelineKind::Truncation { keep_bytes: 2 });
        assert_eq!(t.lossless, LosslessKind::Passthrough);
        let lr = CompressionConfig::new(ErrorMode::Abs, 1.0, PipelineKind::Lr);
        assert_eq!(lr.lossless, LosslessKind::DeflateClass);
    }
}
