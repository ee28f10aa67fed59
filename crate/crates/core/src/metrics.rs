//! Quality and size metrics for compressed/decompressed pairs.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Peak signal-to-noise ratio in dB against the original value range.
/// Perfect reconstruction has no noise floor, so it reports infinity.
pub fn psnr(value_range: f64, mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * value_range.log10() - 10.0 * mse.log10()
    }
}

/// Average compressed bits spent per element.
pub fn bit_rate(compressed_bytes: usize, elements: usize) -> f64 {
    8.0 * compressed_bytes as f64 / elements as f64
}

pub fn compression_ratio(original_bytes: usize, compressed_bytes: usize) -> f64 {
    original_bytes as f64 / compressed_bytes as f64
}

/// Pointwise reconstruction quality of one original/decompressed pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub elements: usize,
    pub value_range: f64,
    pub max_abs_err: f64,
    pub mse: f64,
    pub psnr: f64,
}

pub fn eval<T: Scalar>(original: &[T], decompressed: &[T]) -> Result<EvalReport> {
    if original.len() != decompressed.len() {
        return Err(Error::config(format!(
            "original has {} elements, decompressed has {}",
            original.len(),
            decompressed.len()
        )));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut max_abs_err = 0.0f64;
    let mut sq_sum = 0.0f64;
    for (a, b) in original.iter().zip(decompressed) {
        let a = a.to_f64();
        let b = b.to_f64();
        min = min.min(a);
        max = max.max(a);
        let e = (a - b).abs();
        max_abs_err = max_abs_err.max(e);
        sq_sum += e * e;
    }
    let n = original.len();
    let value_range = if n == 0 { 0.0 } else { max - min };
    let mse = if n == 0 { 0.0 } else { sq_sum / n as f64 };
    Ok(EvalReport {
        elements: n,
        value_range,
        max_abs_err,
        mse,
        psnr: psnr(value_range, mse),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_data_reports_infinite_psnr() {
        let data = vec![1.0f64, 5.0, -3.0, 2.5];
        let r = eval(&data, &data.clone()).unwrap();
        assert_eq!(r.max_abs_err, 0.0);
        assert_eq!(r.mse, 0.0);
        assert!(r.psnr.is_infinite() && r.psnr > 0.0);
        assert_eq!(format!("{}", r.psnr), "inf");
    }

    #[test]
    fn known_error_pattern_matches_hand_computation() {
        let a = vec![0.0f64, 10.0];
        let b = vec![1.0f64, 10.0];
        let r = eval(&a, &b).unwrap();
        assert_eq!(r.value_range, 10.0);
        assert_eq!(r.max_abs_err, 1.0);
        assert_eq!(r.mse, 0.5);
        // 20*log10(10) - 10*log10(0.5) = 20 + 3.0103
        assert!((r.psnr - 23.0103).abs() < 1e-3);
    }

    #[test]
    fn rates_and_ratios_are_consistent() {
        // 100 f32 elements compressed to 50 bytes: 8x ratio, 4 bits each.
        let ratio = compression_ratio(400, 50);
        let rate = bit_rate(50, 100);
        assert_eq!(ratio, 8.0);
        assert_eq!(rate, 4.0);
        assert!((rate - 32.0 / ratio).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_a_config_error() {
        assert!(eval(&[1.0f32], &[1.0f32, 2.0]).is_err());
    }
}
