//! Prediction stage: Lorenzo stencils, per-block linear models, multilevel
//! interpolation, and the per-block selector that arbitrates between
//! Lorenzo and regression in the blockwise pipeline.

pub mod interp;
pub mod lorenzo;
pub mod regression;

use crate::grid::{Block, Layout, MAX_DIMS};
use crate::scalar::Scalar;

/// Per-block predictor selection carried in the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Lorenzo = 0,
    Regression = 1,
}

/// Sampling set for block error estimation: one element per slice along the
/// first axis, walking the main diagonal and clamping on shorter axes.
pub fn diagonal_samples(block: &Block) -> impl Iterator<Item = [usize; MAX_DIMS]> + '_ {
    (0..block.extent[0]).map(move |t| {
        let mut local = [0usize; MAX_DIMS];
        for a in 0..block.ndim {
            local[a] = t.min(block.extent[a] - 1);
        }
        local
    })
}

/// Sum of absolute Lorenzo residuals over the diagonal samples, computed on
/// original (not yet decoded) values, plus a pessimism term: during real
/// compression every causal neighbor may already carry up to `eb` of
/// quantization noise, and the stencil touches 2^ndim - 1 neighbors.
pub fn estimate_lorenzo_error<T: Scalar>(
    orig: &[T],
    layout: &Layout,
    block: &Block,
    eb: f64,
    noise_coeff: f64,
) -> f64 {
    let mut err = 0.0f64;
    let mut samples = 0usize;
    for local in diagonal_samples(block) {
        let mut global = [0usize; MAX_DIMS];
        for a in 0..block.ndim {
            global[a] = block.origin[a] + local[a];
        }
        let actual = orig[layout.flat(&global)].to_f64();
        err += (actual - lorenzo::predict(orig, layout, &global)).abs();
        samples += 1;
    }
    err + samples as f64 * lorenzo::neighbor_count(block.ndim) as f64 * eb * noise_coeff
}

/// Sum of absolute model residuals over the same diagonal samples.
pub fn estimate_regression_error<T: Scalar>(
    orig: &[T],
    layout: &Layout,
    block: &Block,
    coeffs: &regression::Coefficients,
) -> f64 {
    let mut err = 0.0f64;
    for local in diagonal_samples(block) {
        let mut global = [0usize; MAX_DIMS];
        for a in 0..block.ndim {
            global[a] = block.origin[a] + local[a];
        }
        let actual = orig[layout.flat(&global)].to_f64();
        err += (actual - regression::predict(coeffs, &local, block.ndim)).abs();
    }
    err
}

/// Strictly smaller estimate wins; ties and non-finite estimates fall back
/// to Lorenzo, which needs no side information.
pub fn choose(lorenzo_estimate: f64, regression_estimate: f64) -> Choice {
    if regression_estimate < lorenzo_estimate {
        Choice::Regression
    } else {
        Choice::Lorenzo
    }
}
