//! Multidimensional grid storage, row-major indexing and block tiling.
//!
//! Layout is row-major with the last index fastest, matching raw dumps of
//! C-ordered arrays. Dimensionality is 1 to 4; indices are carried as
//! `[usize; MAX_DIMS]` padded with zeros past `ndim` so hot loops avoid
//! per-element heap traffic.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_DIMS: usize = 4;

/// Dense row-major array of `T` with 1..=4 dimensions.
///
/// Extents are normally positive; a zero extent is permitted and yields an
/// empty grid, which compresses to a header-only stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    dims: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(dims: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_DIMS {
            return Err(Error::config(format!(
                "grid must have 1 to {} dimensions, got {}",
                MAX_DIMS,
                dims.len()
            )));
        }
        let expect: usize = dims.iter().product();
        if expect != data.len() {
            return Err(Error::config(format!(
                "dims {:?} imply {} elements but {} were supplied",
                dims,
                expect,
                data.len()
            )));
        }
        Ok(Grid { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_parts(self) -> (Vec<usize>, Vec<T>) {
        (self.dims, self.data)
    }

    pub fn layout(&self) -> Layout {
        Layout::new(&self.dims)
    }
}

/// Precomputed strides for row-major flat indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub ndim: usize,
    pub dims: [usize; MAX_DIMS],
    pub strides: [usize; MAX_DIMS],
}

impl Layout {
    pub fn new(dims: &[usize]) -> Layout {
        assert!(!dims.is_empty() && dims.len() <= MAX_DIMS);
        let ndim = dims.len();
        let mut d = [1usize; MAX_DIMS];
        d[..ndim].copy_from_slice(dims);
        let mut strides = [0usize; MAX_DIMS];
        let mut acc = 1usize;
        for axis in (0..ndim).rev() {
            strides[axis] = acc;
            acc *= d[axis];
        }
        Layout { ndim, dims: d, strides }
    }

    pub fn len(&self) -> usize {
        self.dims[..self.ndim].iter().product()
    }

    pub fn flat(&self, idx: &[usize; MAX_DIMS]) -> usize {
        let mut f = 0usize;
        for axis in 0..self.ndim {
            debug_assert!(idx[axis] < self.dims[axis]);
            f += idx[axis] * self.strides[axis];
        }
        f
    }
}

/// Reads the value at `index + offset`, where every offset component is
/// <= 0 (causal neighborhoods only). Any component falling below zero reads
/// as 0.0, which is the boundary convention all predictors share.
pub fn neighbor<T: Scalar>(
    buf: &[T],
    layout: &Layout,
    index: &[usize; MAX_DIMS],
    offset: &[isize; MAX_DIMS],
) -> f64 {
    let mut flat = 0usize;
    for axis in 0..layout.ndim {
        debug_assert!(offset[axis] <= 0);
        let pos = index[axis] as isize + offset[axis];
        if pos < 0 {
            return 0.0;
        }
        flat += pos as usize * layout.strides[axis];
    }
    buf[flat].to_f64()
}

/// One tile of a block decomposition: global origin plus clipped extents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub origin: [usize; MAX_DIMS],
    pub extent: [usize; MAX_DIMS],
    pub ndim: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        self.extent[..self.ndim].iter().product()
    }
}

/// Tiles `dims` into cubes of side `block_size`, edge tiles clipped, yielded
/// in row-major origin order. Every index lands in exactly one tile.
pub fn blocks(dims: &[usize], block_size: usize) -> BlockIter {
    assert!(block_size > 0, "block size must be positive");
    BlockIter {
        layout: Layout::new(dims),
        block_size,
        cursor: [0; MAX_DIMS],
        done: dims.iter().any(|&d| d == 0),
    }
}

pub struct BlockIter {
    layout: Layout,
    block_size: usize,
    cursor: [usize; MAX_DIMS],
    done: bool,
}

impl Iterator for BlockIter {
    type Item = Block;

    fn next(&mut self) -> Option<Block> {
        if self.done {
            return None;
        }
        let nd = self.layout.ndim;
        let mut extent = [1usize; MAX_DIMS];
        for axis in 0..nd {
            extent[axis] = self.block_size.min(self.layout.dims[axis] - self.cursor[axis]);
        }
        let item = Block { origin: self.cursor, extent, ndim: nd };
        // Advance the origin odometer, last axis fastest.
        let mut axis = nd;
        loop {
            if axis == 0 {
                self.done = true;
                break;
            }
            axis -= 1;
            self.cursor[axis] += self.block_size;
            if self.cursor[axis] < self.layout.dims[axis] {
                break;
            }
            self.cursor[axis] = 0;
        }
        Some(item)
    }
}

/// Row-major odometer over all indices of `extent` (first `ndim` axes).
pub fn for_each_index(extent: &[usize; MAX_DIMS], ndim: usize, mut f: impl FnMut(&[usize; MAX_DIMS])) {
    for idx in index_iter(extent, ndim) {
        f(&idx);
    }
}

/// Iterator form of `for_each_index`, for loops that need early exit.
pub fn index_iter(extent: &[usize; MAX_DIMS], ndim: usize) -> IndexIter {
    IndexIter {
        extent: *extent,
        ndim,
        cursor: [0; MAX_DIMS],
        done: extent[..ndim].iter().any(|&e| e == 0),
    }
}

pub struct IndexIter {
    extent: [usize; MAX_DIMS],
    ndim: usize,
    cursor: [usize; MAX_DIMS],
    done: bool,
}

impl Iterator for IndexIter {
    type Item = [usize; MAX_DIMS];

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.cursor;
        let mut axis = self.ndim;
        loop {
            if axis == 0 {
                self.done = true;
                break;
            }
            axis -= 1;
            self.cursor[axis] += 1;
            if self.cursor[axis] < self.extent[axis] {
                break;
            }
            self.cursor[axis] = 0;
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_dim_data_mismatch() {
        assert!(Grid::<f32>::new(vec![2, 3], vec![0.0; 5]).is_err());
        assert!(Grid::<f32>::new(vec![], vec![]).is_err());
        assert!(Grid::<f32>::new(vec![1, 1, 1, 1, 1], vec![0.0]).is_err());
    }

    #[test]
    fn accepts_empty_extent() {
        let g = Grid::<f64>::new(vec![0, 4], vec![]).unwrap();
        assert!(g.is_empty());
        assert_eq!(blocks(g.dims(), 4).count(), 0);
    }

    #[test]
    fn strides_are_row_major_last_fastest() {
        let l = Layout::new(&[2, 3, 4]);
        assert_eq!(&l.strides[..3], &[12, 4, 1]);
        assert_eq!(l.flat(&[1, 2, 3, 0]), 23);
    }

    #[test]
    fn tiles_dim_10_block_4_into_4_4_2() {
        let ext: Vec<usize> = blocks(&[10], 4).map(|b| b.extent[0]).collect();
        assert_eq!(ext, vec![4, 4, 2]);
    }

    #[test]
    fn tiles_7x7_block_4_into_clipped_quadrants() {
        let got: Vec<(usize, usize)> = blocks(&[7, 7], 4).map(|b| (b.extent[0], b.extent[1])).collect();
        assert_eq!(got, vec![(4, 4), (4, 3), (3, 4), (3, 3)]);
    }

    #[test]
    fn tiling_covers_every_index_exactly_once() {
        for dims in [vec![10], vec![7, 7], vec![5, 6, 7], vec![3, 4, 2, 5]] {
            for bs in [1usize, 3, 4, 6, 9] {
                let layout = Layout::new(&dims);
                let mut seen = vec![0u8; layout.len()];
                for b in blocks(&dims, bs) {
                    for_each_index(&b.extent, b.ndim, |local| {
                        let mut g = [0usize; MAX_DIMS];
                        for a in 0..b.ndim {
                            g[a] = b.origin[a] + local[a];
                        }
                        seen[layout.flat(&g)] += 1;
                    });
                }
                assert!(seen.iter().all(|&c| c == 1), "dims {dims:?} bs {bs}");
            }
        }
    }

    #[test]
    fn neighbor_zero_fills_past_the_boundary() {
        let layout = Layout::new(&[2, 2]);
        let buf = [1.0f64, 2.0, 3.0, 4.0];
        assert_eq!(neighbor(&buf, &layout, &[0, 0, 0, 0], &[-1, 0, 0, 0]), 0.0);
        assert_eq!(neighbor(&buf, &layout, &[1, 1, 0, 0], &[-1, -1, 0, 0]), 1.0);
        assert_eq!(neighbor(&buf, &layout, &[1, 0, 0, 0], &[0, -1, 0, 0]), 0.0);
    }
}
