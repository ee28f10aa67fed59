//! Multilevel interpolation prediction.
//!
//! The grid is filled in coarse-to-fine passes. At stride s the pass for
//! axis `a` predicts the points whose coordinate along `a` is an odd
//! multiple of s, whose coordinates on earlier axes are multiples of s, and
//! whose coordinates on later axes are multiples of 2s. Donors for such a
//! point sit at -3s, -s, +s, +3s along `a` and are always either the anchor
//! or points settled by an earlier pass, so compression and decompression
//! can process elements in identical order. Every non-anchor index is
//! predicted by exactly one pass; the anchor (all zeros) is stored raw.

use crate::grid::{Layout, MAX_DIMS};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pass {
    pub stride: usize,
    pub axis: usize,
}

/// Pass schedule for `dims`: strides descending by powers of two from the
/// largest power of two below the maximum extent, axes in order within each
/// stride. Empty when the grid has at most one point per axis.
pub fn plan(dims: &[usize]) -> Vec<Pass> {
    let max_extent = dims.iter().copied().max().unwrap_or(0);
    if max_extent <= 1 {
        return Vec::new();
    }
    let mut stride = 1usize;
    while stride * 2 < max_extent {
        stride *= 2;
    }
    let mut passes = Vec::new();
    while stride >= 1 {
        for axis in 0..dims.len() {
            passes.push(Pass { stride, axis });
        }
        if stride == 1 {
            break;
        }
        stride /= 2;
    }
    passes
}

/// Visits the points of one pass in row-major order.
pub fn for_each_pass_point(layout: &Layout, pass: Pass, mut f: impl FnMut(&[usize; MAX_DIMS])) {
    for idx in pass_points(layout, pass) {
        f(&idx);
    }
}

/// Iterator form of `for_each_pass_point`, for loops that need early exit.
pub fn pass_points(layout: &Layout, pass: Pass) -> PassIter {
    let nd = layout.ndim;
    let Pass { stride, axis } = pass;
    let mut start = [0usize; MAX_DIMS];
    let mut step = [1usize; MAX_DIMS];
    let mut done = false;
    for j in 0..nd {
        if j == axis {
            start[j] = stride;
            step[j] = 2 * stride;
        } else if j < axis {
            step[j] = stride;
        } else {
            step[j] = 2 * stride;
        }
        if start[j] >= layout.dims[j] {
            done = true;
        }
    }
    PassIter { dims: layout.dims, ndim: nd, start, step, cursor: start, done }
}

pub struct PassIter {
    dims: [usize; MAX_DIMS],
    ndim: usize,
    start: [usize; MAX_DIMS],
    step: [usize; MAX_DIMS],
    cursor: [usize; MAX_DIMS],
    done: bool,
}

impl Iterator for PassIter {
    type Item = [usize; MAX_DIMS];

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.cursor;
        let mut a = self.ndim;
        loop {
            if a == 0 {
                self.done = true;
                break;
            }
            a -= 1;
            self.cursor[a] += self.step[a];
            if self.cursor[a] < self.dims[a] {
                break;
            }
            self.cursor[a] = self.start[a];
        }
        Some(item)
    }
}

/// Predicts one pass point from its axis-line donors in `buf`.
///
/// Four in-range donors give the cubic kernel (-f0 + 9f1 + 9f2 - f3)/16,
/// exact for cubic polynomials along the line. With only the two nearest
/// donors in range the prediction is their average; when even the forward
/// donor is missing it degrades to copying the backward donor, which always
/// exists because pass coordinates start at `stride`.
pub fn predict<T: Scalar>(
    buf: &[T],
    layout: &Layout,
    index: &[usize; MAX_DIMS],
    pass: Pass,
) -> f64 {
    let Pass { stride, axis } = pass;
    let x = index[axis];
    let extent = layout.dims[axis];
    let s = layout.strides[axis];
    let flat = layout.flat(index);
    debug_assert!(x >= stride);

    let back1 = buf[flat - stride * s].to_f64();
    if x + stride < extent {
        let fwd1 = buf[flat + stride * s].to_f64();
        if x >= 3 * stride && x + 3 * stride < extent {
            let back3 = buf[flat - 3 * stride * s].to_f64();
            let fwd3 = buf[flat + 3 * stride * s].to_f64();
            (-back3 + 9.0 * back1 + 9.0 * fwd1 - fwd3) / 16.0
        } else {
            (back1 + fwd1) / 2.0
        }
    } else {
        back1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::for_each_index;

    #[test]
    fn strides_descend_from_largest_power_of_two_below_max_extent() {
        let p = plan(&[9]);
        let strides: Vec<usize> = p.iter().map(|p| p.stride).collect();
        assert_eq!(strides, vec![8, 4, 2, 1]);
        let p = plan(&[16, 5]);
        let strides: Vec<usize> = p.iter().step_by(2).map(|p| p.stride).collect();
        assert_eq!(strides, vec![8, 4, 2, 1]);
        assert!(plan(&[1, 1]).is_empty());
    }

    #[test]
    fn passes_cover_every_non_anchor_index_exactly_once() {
        for dims in [
            vec![1usize],
            vec![2],
            vec![5],
            vec![17],
            vec![6, 9],
            vec![1, 8],
            vec![4, 5, 7],
            vec![3, 1, 16],
        ] {
            let layout = Layout::new(&dims);
            let mut seen = vec![0u32; layout.len()];
            for pass in plan(&dims) {
                for_each_pass_point(&layout, pass, |idx| {
                    seen[layout.flat(idx)] += 1;
                });
            }
            assert_eq!(seen[0], 0, "anchor must stay unassigned, dims {dims:?}");
            assert!(
                seen[1..].iter().all(|&c| c == 1),
                "dims {dims:?}: coverage {seen:?}"
            );
        }
    }

    #[test]
    fn donors_precede_their_pass() {
        // Replay the plan marking settled points; every donor a prediction
        // reads must already be settled.
        let dims = vec![11usize, 6];
        let layout = Layout::new(&dims);
        let mut settled = vec![false; layout.len()];
        settled[0] = true;
        for pass in plan(&dims) {
            let mut points = Vec::new();
            for_each_pass_point(&layout, pass, |idx| points.push(*idx));
            for idx in &points {
                let x = idx[pass.axis];
                for donor in [
                    x.checked_sub(3 * pass.stride),
                    x.checked_sub(pass.stride),
                    Some(x + pass.stride),
                    Some(x + 3 * pass.stride),
                ]
                .into_iter()
                .flatten()
                {
                    if donor >= layout.dims[pass.axis] {
                        continue;
                    }
                    let mut d = *idx;
                    d[pass.axis] = donor;
                    assert!(settled[layout.flat(&d)], "unsettled donor {d:?} for {idx:?}");
                }
            }
            for idx in &points {
                settled[layout.flat(idx)] = true;
            }
        }
    }

    #[test]
    fn cubic_kernel_is_exact_on_cubics() {
        let poly = |t: f64| t * t * t - 2.0 * t * t + 3.0 * t - 1.0;
        let dims = vec![33usize];
        let layout = Layout::new(&dims);
        let data: Vec<f64> = (0..33).map(|t| poly(t as f64)).collect();
        for pass in plan(&dims) {
            for_each_pass_point(&layout, pass, |idx| {
                let x = idx[0];
                if x >= 3 * pass.stride && x + 3 * pass.stride < 33 {
                    let p = predict(&data, &layout, idx, pass);
                    assert!((p - data[x]).abs() < 1e-9, "stride {} x {x}: {p}", pass.stride);
                }
            });
        }
    }

    #[test]
    fn two_donor_points_use_the_average() {
        let dims = vec![5usize];
        let layout = Layout::new(&dims);
        let data = [10.0f64, 0.0, 30.0, 0.0, 50.0];
        // Stride 2, x = 2: donors at 0 and 4 only (x-3s < 0, x+3s > 4).
        let p = predict(&data, &layout, &[2, 0, 0, 0], Pass { stride: 2, axis: 0 });
        assert_eq!(p, 30.0);
    }

    #[test]
    fn missing_forward_donor_copies_backward_donor() {
        let dims = vec![6usize];
        let layout = Layout::new(&dims);
        let data = [1.0f64, 2.0, 3.0, 4.0, 9.0, 6.0];
        // Stride 4, x = 4: x + s = 8 out of range.
        let p = predict(&data, &layout, &[4, 0, 0, 0], Pass { stride: 4, axis: 0 });
        assert_eq!(p, data[0]);
    }

    #[test]
    fn multidim_passes_predict_along_their_own_axis() {
        let dims = vec![4usize, 4];
        let layout = Layout::new(&dims);
        // f(i, j) = 10i + j so axis-0 and axis-1 lines have distinct slopes.
        let mut data = vec![0.0f64; 16];
        for_each_index(&layout.dims, 2, |idx| {
            data[layout.flat(idx)] = 10.0 * idx[0] as f64 + idx[1] as f64;
        });
        let p0 = predict(&data, &layout, &[1, 0, 0, 0], Pass { stride: 1, axis: 0 });
        assert_eq!(p0, 10.0); // average of f(0,0)=0 and f(2,0)=20
        let p1 = predict(&data, &layout, &[0, 1, 0, 0], Pass { stride: 1, axis: 1 });
        assert_eq!(p1, 1.0); // average of f(0,0)=0 and f(0,2)=2
    }
}
