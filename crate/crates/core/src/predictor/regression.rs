//! Per-block linear model f(i,j,k) ~ b0 + b1*i + b2*j + b3*k fitted in
//! closed form. The least-squares normal equations for a full integer
//! lattice decouple per axis, which collapses the 4x4 solve to four moment
//! sums:
//!
//!   V0 = sum f,  Va = sum (local index along axis a) * f
//!   b_a = 6 / (n1*n2*n3 * (na + 1)) * (2*Va / (na - 1) - V0)
//!   b0  = V0 / (n1*n2*n3) - sum_a (na - 1) / 2 * b_a
//!
//! An axis of extent 1 carries no slope information; its coefficient is
//! pinned to 0, which is the least-squares solution of the reduced model.
//! Accumulation is always f64, including for f32 grids.

use crate::grid::{for_each_index, MAX_DIMS};

/// Maximum dimensionality the linear model supports.
pub const MAX_REGRESSION_DIMS: usize = 3;

/// Coefficients ordered (intercept, slope axis 0, slope axis 1, slope axis 2).
/// Slopes past `ndim` are zero.
pub type Coefficients = [f64; 4];

/// Fits the block whose local values are produced by `value` (row-major
/// local indices). `extent` holds the block extents for `ndim` axes.
pub fn fit_block(
    extent: &[usize; MAX_DIMS],
    ndim: usize,
    mut value: impl FnMut(&[usize; MAX_DIMS]) -> f64,
) -> Coefficients {
    assert!(ndim >= 1 && ndim <= MAX_REGRESSION_DIMS);
    let mut v0 = 0.0f64;
    let mut vaxis = [0.0f64; MAX_REGRESSION_DIMS];
    for_each_index(extent, ndim, |idx| {
        let f = value(idx);
        v0 += f;
        for a in 0..ndim {
            vaxis[a] += idx[a] as f64 * f;
        }
    });

    let total: usize = extent[..ndim].iter().product();
    let total = total as f64;
    let mut beta = [0.0f64; 4];
    for a in 0..ndim {
        let n = extent[a];
        if n > 1 {
            let nf = n as f64;
            beta[a + 1] = 6.0 / (total * (nf + 1.0)) * (2.0 * vaxis[a] / (nf - 1.0) - v0);
        }
    }
    let mut intercept = v0 / total;
    for a in 0..ndim {
        intercept -= (extent[a] as f64 - 1.0) / 2.0 * beta[a + 1];
    }
    beta[0] = intercept;
    beta
}

/// Evaluates the model at a block-local index.
#[inline]
pub fn predict(coeffs: &Coefficients, local: &[usize; MAX_DIMS], ndim: usize) -> f64 {
    let mut p = coeffs[0];
    for a in 0..ndim {
        p += coeffs[a + 1] * local[a] as f64;
    }
    p
}
