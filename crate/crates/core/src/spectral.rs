//! Cubic-grid FFTs built from 1-D transforms along each axis.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::lattice::LatticePoint;

/// Forward (`e^{−2πi}`) and inverse (`e^{+2πi}`, unnormalized) transforms of
/// a `g × g × g` array stored with the last axis fastest.
pub struct Fft3 {
    g: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(g: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            g,
            forward: planner.plan_fft_forward(g),
            inverse: planner.plan_fft_inverse(g),
        }
    }

    pub fn size(&self) -> usize {
        self.g
    }

    pub fn len(&self) -> usize {
        self.g * self.g * self.g
    }

    pub fn is_empty(&self) -> bool {
        self.g == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, &self.forward);
    }

    /// Unnormalized inverse: `Σ_ξ c_ξ e^{2πi ξ·x}` at the grid nodes.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, &self.inverse);
    }

    fn apply(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let g = self.g;
        assert_eq!(data.len(), g * g * g);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // last axis: contiguous rows
        for row in data.chunks_exact_mut(g) {
            fft.process_with_scratch(row, &mut scratch);
        }
        let mut line = vec![Complex64::new(0.0, 0.0); g];
        // middle axis
        for i in 0..g {
            for k in 0..g {
                for j in 0..g {
                    line[j] = data[(i * g + j) * g + k];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for j in 0..g {
                    data[(i * g + j) * g + k] = line[j];
                }
            }
        }
        // first axis
        for j in 0..g {
            for k in 0..g {
                for i in 0..g {
                    line[i] = data[(i * g + j) * g + k];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for i in 0..g {
                    data[(i * g + j) * g + k] = line[i];
                }
            }
        }
    }

    /// Storage index of frequency `ξ` (taken mod `g`).
    pub fn index(&self, xi: &LatticePoint) -> usize {
        let g = self.g as i64;
        let m = |c: i64| c.rem_euclid(g) as usize;
        (m(xi.0[0]) * self.g + m(xi.0[1])) * self.g + m(xi.0[2])
    }

    /// Signed frequency stored at index `i`, in `[−g/2, g/2)`.
    pub fn frequency(&self, i: usize) -> LatticePoint {
        let g = self.g;
        let s = |c: usize| {
            let c = c as i64;
            if c >= (g as i64 + 1) / 2 {
                c - g as i64
            } else {
                c
            }
        };
        LatticePoint::new(s(i / (g * g)), s((i / g) % g), s(i % g))
    }
}
