//! Hankel matrices of negative-frequency Fourier coefficients.
//!
//! `H[i][j] = h[i + j]` with `h[k] = g_{-(k+1)}`. Products with `H` and `H^T`
//! are correlations of `h` with the input; they are evaluated as one cyclic
//! convolution of length `L >= rows + cols` so `H` is never formed.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{QspError, Result};

/// `rows x cols` Hankel matrix defined by `rows + cols - 1` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelSystem {
    ghat: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl HankelSystem {
    pub fn new(ghat: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(QspError::Config("Hankel system needs at least one row and column".into()));
        }
        if ghat.len() != rows + cols - 1 {
            return Err(QspError::Shape {
                expected: rows + cols - 1,
                actual: ghat.len(),
            });
        }
        if ghat.iter().any(|v| !v.is_finite()) {
            return Err(QspError::Config("Hankel entries must be finite".into()));
        }
        Ok(Self { ghat, rows, cols })
    }

    /// The defining sequence `g_{-1}, g_{-2}, ...`.
    pub fn ghat(&self) -> &[f64] {
        &self.ghat
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Polynomial degree `d` with `cols = 2d + 1`.
    pub fn degree(&self) -> usize {
        (self.cols - 1) / 2
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.ghat[i + j]
    }

    /// `sqrt(sum_ij H_ij^2)`, counting each anti-diagonal's multiplicity.
    pub fn frobenius_norm(&self) -> f64 {
        let (r, c) = (self.rows, self.cols);
        self.ghat
            .iter()
            .enumerate()
            .map(|(k, h)| {
                let count = k.min(r - 1).min(c - 1).min(r + c - 2 - k) + 1;
                count as f64 * h * h
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.ghat.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Row-major dense copy, for tests and small-scale diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// Planned FFT form of a [`HankelSystem`], reusable across products.
#[derive(Clone)]
pub struct HankelOperator {
    rows: usize,
    cols: usize,
    len: usize,
    spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for HankelOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HankelOperator")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("len", &self.len)
            .finish()
    }
}

impl HankelOperator {
    pub fn new(sys: &HankelSystem) -> Self {
        let len = (sys.rows + sys.cols).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); len];
        for (s, h) in spectrum.iter_mut().zip(&sys.ghat) {
            s.re = *h;
        }
        forward.process(&mut spectrum);
        let inv = 1.0 / len as f64;
        spectrum.iter_mut().for_each(|s| *s *= inv);
        Self {
            rows: sys.rows,
            cols: sys.cols,
            len,
            spectrum,
            forward,
            inverse,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `H v`, or `H^T v` when `transpose` is set.
    pub fn apply(&self, v: &[f64], transpose: bool) -> Result<Vec<f64>> {
        let (n_in, n_out) = if transpose {
            (self.rows, self.cols)
        } else {
            (self.cols, self.rows)
        };
        if v.len() != n_in {
            return Err(QspError::Shape {
                expected: n_in,
                actual: v.len(),
            });
        }
        // y_i = sum_j h[i + j] v_j = (h * reverse(v))[i + n_in - 1]
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (b, x) in buf.iter_mut().zip(v.iter().rev()) {
            b.re = *x;
        }
        self.forward.process(&mut buf);
        buf.iter_mut().zip(&self.spectrum).for_each(|(b, s)| *b *= s);
        self.inverse.process(&mut buf);
        Ok(buf[n_in - 1..n_in - 1 + n_out].iter().map(|c| c.re).collect())
    }
}

/// One-shot product with `H` or `H^T`.
pub fn hankel_matvec(sys: &HankelSystem, v: &[f64], transpose: bool) -> Result<Vec<f64>> {
    HankelOperator::new(sys).apply(v, transpose)
}
