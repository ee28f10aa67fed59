//! Deterministic synthetic grids for tests and benchmarks. Every field is a
//! pure function of (kind, dims, seed), so runs are reproducible anywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Grid, Layout, MAX_DIMS};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// One seeded value everywhere.
    Constant,
    /// Seeded affine ramp across all axes; exactly what regression fits.
    Affine,
    /// Three incommensurate sinusoids per axis: smooth but curvy.
    Sines,
    /// Independent uniform noise in [-1, 1): incompressible by design.
    Noise,
    /// Nonnegative integer counts with a smoothly varying mean, shaped like
    /// sparse detector data.
    IntegerCounts,
}

impl std::str::FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<SynthKind> {
        match s.to_ascii_uppercase().as_str() {
            "CONSTANT" => Ok(SynthKind::Constant),
            "AFFINE" => Ok(SynthKind::Affine),
            "SINES" => Ok(SynthKind::Sines),
            "NOISE" => Ok(SynthKind::Noise),
            "INTEGER_COUNTS" => Ok(SynthKind::IntegerCounts),
            other => Err(Error::config(format!(
                "unknown synthetic kind {other}; expected CONSTANT, AFFINE, SINES, NOISE, or INTEGER_COUNTS"
            ))),
        }
    }
}

pub fn generate<T: Scalar>(kind: SynthKind, dims: &[usize], seed: u64) -> Result<Grid<T>> {
    let layout = Layout::new(dims);
    let n = layout.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<T> = match kind {
        SynthKind::Constant => {
            let v = rng.gen_range(-100.0..100.0);
            vec![T::from_f64(v); n]
        }
        SynthKind::Affine => {
            let intercept: f64 = rng.gen_range(-10.0..10.0);
            let mut slopes = [0.0f64; MAX_DIMS];
            for s in slopes.iter_mut().take(dims.len()) {
                *s = rng.gen_range(-2.0..2.0);
            }
            map_indices(&layout, |idx| {
                let mut v = intercept;
                for a in 0..dims.len() {
                    v += slopes[a] * idx[a] as f64;
                }
                v
            })
        }
        SynthKind::Sines => {
            // Three superposed plane waves. Each wave carries its own
            // frequency along every axis, scaled by pairwise-irrational
            // multipliers, so no axis sees a short repeating pattern and the
            // waves stay oblique to the grid. An axis-aligned sum of
            // sinusoids would be additively separable, which the Lorenzo
            // stencil predicts exactly and which therefore exercises almost
            // nothing; oblique waves behave like genuinely multidimensional
            // smooth data.
            const MULTIPLIERS: [f64; 3] = [1.0, std::f64::consts::SQRT_2, 2.236_067_977_499_79];
            let mut amp = [0.0f64; 3];
            let mut phase = [0.0f64; 3];
            let mut freq = [[0.0f64; MAX_DIMS]; 3];
            for k in 0..3 {
                amp[k] = rng.gen_range(0.5..1.5);
                phase[k] = rng.gen_range(0.0..std::f64::consts::TAU);
                for a in 0..dims.len() {
                    freq[k][a] = MULTIPLIERS[(k + a) % 3] * rng.gen_range(1.0..4.0)
                        / (dims[a].max(2) as f64);
                }
            }
            map_indices(&layout, |idx| {
                let mut v = 0.0;
                for k in 0..3 {
                    let mut arg = phase[k];
                    for a in 0..dims.len() {
                        arg += std::f64::consts::TAU * freq[k][a] * idx[a] as f64;
                    }
                    v += amp[k] * arg.sin();
                }
                v
            })
        }
        SynthKind::Noise => (0..n).map(|_| T::from_f64(rng.gen_range(-1.0..1.0))).collect(),
        SynthKind::IntegerCounts => {
            // Binomial(16, p) per element with p drifting smoothly across
            // the grid: clustered small counts with occasional spikes, and
            // no transcendental math anywhere in the sampler.
            let mut centers = [0.0f64; MAX_DIMS];
            for c in centers.iter_mut().take(dims.len()) {
                *c = rng.gen_range(0.2..0.8);
            }
            let layout2 = layout;
            let mut out = Vec::with_capacity(n);
            let mut idx_rng = rng;
            for idx in crate::grid::index_iter(&layout2.dims, layout2.ndim) {
                let mut p = 0.08;
                for a in 0..dims.len() {
                    let rel = idx[a] as f64 / dims[a].max(1) as f64;
                    let d = (rel - centers[a]).abs();
                    p += 0.35 * (1.0 - d).max(0.0) / dims.len() as f64;
                }
                let mut count = 0u32;
                for _ in 0..16 {
                    if idx_rng.gen::<f64>() < p {
                        count += 1;
                    }
                }
                out.push(T::from_f64(count as f64));
            }
            out
        }
    };
    Grid::new(dims.to_vec(), data)
}

fn map_indices<T: Scalar>(layout: &Layout, mut f: impl FnMut(&[usize; MAX_DIMS]) -> f64) -> Vec<T> {
    let mut out = Vec::with_capacity(layout.len());
    for idx in crate::grid::index_iter(&layout.dims, layout.ndim) {
        out.push(T::from_f64(f(&idx)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_field_different_seed_different_field() {
        for kind in [
            SynthKind::Constant,
            SynthKind::Affine,
            SynthKind::Sines,
            SynthKind::Noise,
            SynthKind::IntegerCounts,
        ] {
            let a = generate::<f64>(kind, &[6, 7], 9).unwrap();
            let b = generate::<f64>(kind, &[6, 7], 9).unwrap();
            let c = generate::<f64>(kind, &[6, 7], 10).unwrap();
            assert_eq!(a.data(), b.data(), "{kind:?} not deterministic");
            assert_ne!(a.data(), c.data(), "{kind:?} ignores the seed");
        }
    }

    #[test]
    fn integer_counts_are_nonnegative_integers() {
        let g = generate::<f32>(SynthKind::IntegerCounts, &[16, 16, 8], 3).unwrap();
        assert!(g.data().iter().all(|&v| v >= 0.0 && v == v.round()));
        let distinct: std::collections::BTreeSet<u32> =
            g.data().iter().map(|&v| v as u32).collect();
        assert!(distinct.len() > 3, "counts should vary, got {distinct:?}");
    }

    #[test]
    fn affine_field_is_exactly_planar() {
        let g = generate::<f64>(SynthKind::Affine, &[5, 9], 11).unwrap();
        let layout = g.layout();
        let d = g.data();
        let base = d[layout.flat(&[0, 0, 0, 0])];
        let di = d[layout.flat(&[1, 0, 0, 0])] - base;
        let dj = d[layout.flat(&[0, 1, 0, 0])] - base;
        for i in 0..5 {
            for j in 0..9 {
                let expect = base + di * i as f64 + dj * j as f64;
                let got = d[layout.flat(&[i, j, 0, 0])];
                assert!((got - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kinds_parse_case_insensitively() {
        assert_eq!("integer_counts".parse::<SynthKind>().unwrap(), SynthKind::IntegerCounts);
        assert_eq!("SINES".parse::<SynthKind>().unwrap(), SynthKind::Sines);
        assert!("plasma".parse::<SynthKind>().is_err());
    }

    #[test]
    fn noise_covers_the_unit_interval() {
        let g = generate::<f64>(SynthKind::Noise, &[1000], 5).unwrap();
        let max = g.data().iter().cloned().fold(f64::MIN, f64::max);
        let min = g.data().iter().cloned().fold(f64::MAX, f64::min);
        assert!(max > 0.8 && min < -0.8);
        assert!(g.data().iter().all(|v| (-1.0..1.0).contains(v)));
    }
}
