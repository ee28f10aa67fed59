//! Order-1 Lorenzo prediction: inclusion-exclusion over the causal corner
//! neighbors. Out-of-range neighbors read as zero. Exact on affine fields at
//! interior points for 2 and 3 dimensions; the 1D form is previous-value
//! prediction and exact only on constants.

use crate::grid::{Layout, MAX_DIMS};
use crate::scalar::Scalar;

/// Number of neighbors the stencil touches: 2^ndim - 1.
pub fn neighbor_count(ndim: usize) -> usize {
    (1usize << ndim) - 1
}

/// Predicts `buf[index]` from its already-processed causal neighbors.
///
/// Each nonempty subset S of axes contributes the value one step back along
/// every axis in S, with sign +1 for odd |S| and -1 for even |S|.
pub fn predict<T: Scalar>(buf: &[T], layout: &Layout, index: &[usize; MAX_DIMS]) -> f64 {
    let nd = layout.ndim;
    let flat = layout.flat(index);
    let mut sum = 0.0f64;
    for mask in 1u32..(1 << nd) {
        let mut off = 0usize;
        let mut in_range = true;
        for axis in 0..nd {
            if (mask >> axis) & 1 == 1 {
                if index[axis] == 0 {
                    in_range = false;
                    break;
                }
                off += layout.strides[axis];
            }
        }
        if !in_range {
            continue;
        }
        let v = buf[flat - off].to_f64();
        if mask.count_ones() % 2 == 1 {
            sum += v;
        } else {
            sum -= v;
        }
    }
    sum
}

/// 1D previous-value prediction over a linear buffer, used by the
/// time-series stack where the grid is processed flattened.
pub fn predict_linear<T: Scalar>(buf: &[T], flat: usize) -> f64 {
    if flat == 0 {
        0.0
    } else {
        buf[flat - 1].to_f64()
    }
}
