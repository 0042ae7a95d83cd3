//! Laurent polynomials on the unit circle.
//!
//! A [`TrigPoly`] of degree `n` stores the coefficients of `z^k`, `k = -n..=n`,
//! densely. On the circle `z = e^{it}` it is the trigonometric polynomial
//! `sum_k c_k e^{ikt}`. Samples on a uniform grid and coefficients are related
//! by [`analyze`] and [`TrigPoly::synthesize`]; frequency `k` lives in FFT bin
//! `k mod N`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{QspError, Result};

pub const DEFAULT_OVERSAMPLE: usize = 16;

/// Parity in `x = cos t`, i.e. support on even or odd frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    pub fn of_degree(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Whether frequency `k` may carry a nonzero coefficient.
    pub fn admits(self, k: isize) -> bool {
        match self {
            Parity::Even => k.rem_euclid(2) == 0,
            Parity::Odd => k.rem_euclid(2) == 1,
            Parity::None => true,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::None => "none",
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Uniform grid `t_n = 2 pi n / N` on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitCircleGrid {
    size: usize,
}

impl UnitCircleGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || !size.is_multiple_of(2) {
            return Err(QspError::InvalidGrid(size));
        }
        Ok(Self { size })
    }

    /// Smallest even grid that resolves `degree` without aliasing.
    pub fn for_degree(degree: usize) -> Self {
        Self {
            size: 2 * degree + 2,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn node(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 / self.size as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(move |n| self.node(n))
    }

    /// Largest degree this grid resolves: `N/2 - 1`.
    pub fn max_degree(&self) -> usize {
        self.size / 2 - 1
    }
}

/// Fourier coefficients of grid samples, indexed `-N/2 < k <= N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn nyquist(&self) -> usize {
        self.bins.len() / 2
    }

    /// Coefficient of frequency `k`, taken modulo the grid size.
    pub fn coeff(&self, k: isize) -> Complex64 {
        let n = self.bins.len() as isize;
        self.bins[k.rem_euclid(n) as usize]
    }

    /// Raw FFT-ordered bins.
    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn max_abs(&self) -> f64 {
        self.bins.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficients `-degree..=degree` as a [`TrigPoly`]; entries not admitted
    /// by `parity` are set to zero.
    pub fn truncate(&self, degree: usize, parity: Parity) -> Result<TrigPoly> {
        if 2 * degree + 2 > self.bins.len() {
            return Err(QspError::Aliasing {
                grid: self.bins.len(),
                degree,
                needed: 2 * degree + 2,
            });
        }
        let d = degree as isize;
        let coeffs = (-d..=d)
            .map(|k| {
                if parity.admits(k) {
                    self.coeff(k)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        TrigPoly::new(coeffs, parity)
    }
}

/// `g_k = (1/N) sum_n samples[n] e^{-i k t_n}`.
pub fn analyze(samples: &[Complex64], grid: UnitCircleGrid) -> Result<Spectrum> {
    if samples.len() != grid.size() {
        return Err(QspError::Shape {
            expected: grid.size(),
            actual: samples.len(),
        });
    }
    let mut bins = samples.to_vec();
    let fft = FftPlanner::new().plan_fft_forward(bins.len());
    fft.process(&mut bins);
    let inv = 1.0 / grid.size() as f64;
    bins.iter_mut().for_each(|c| *c *= inv);
    Ok(Spectrum { bins })
}

/// Real-sample convenience wrapper around [`analyze`].
pub fn analyze_real(samples: &[f64], grid: UnitCircleGrid) -> Result<Spectrum> {
    let v: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    analyze(&v, grid)
}

/// Laurent polynomial `sum_{k=-n}^{n} c_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    coeffs: Vec<Complex64>,
    parity: Parity,
}

impl TrigPoly {
    /// Builds from coefficients ordered `k = -n..=n`. The zero pattern must
    /// match `parity` exactly.
    pub fn new(coeffs: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return Err(QspError::Shape {
                expected: coeffs.len() + 1,
                actual: coeffs.len(),
            });
        }
        let n = (coeffs.len() / 2) as isize;
        for (i, c) in coeffs.iter().enumerate() {
            let k = i as isize - n;
            if !parity.admits(k) && (c.re != 0.0 || c.im != 0.0) {
                return Err(QspError::ParityMismatch(k));
            }
        }
        Ok(Self { coeffs, parity })
    }

    pub fn zero(degree: usize, parity: Parity) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1],
            parity,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            coeffs: vec![c],
            parity: Parity::Even,
        }
    }

    /// `amp * cos(k t)`.
    pub fn cos(k: usize, amp: f64) -> Self {
        let mut p = Self::zero(k, Parity::of_degree(k));
        if k == 0 {
            p.coeffs[0] = Complex64::new(amp, 0.0);
        } else {
            p.set(k as isize, Complex64::new(amp / 2.0, 0.0));
            p.set(-(k as isize), Complex64::new(amp / 2.0, 0.0));
        }
        p
    }

    /// `amp * sin(k t)`.
    pub fn sin(k: usize, amp: f64) -> Self {
        let mut p = Self::zero(k, Parity::of_degree(k));
        if k > 0 {
            p.set(k as isize, Complex64::new(0.0, -amp / 2.0));
            p.set(-(k as isize), Complex64::new(0.0, amp / 2.0));
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Coefficients ordered `k = -n..=n`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`; zero outside the stored range.
    pub fn coeff(&self, k: isize) -> Complex64 {
        let n = self.degree() as isize;
        if k.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// Panics if `|k|` exceeds the degree.
    pub fn set(&mut self, k: isize, c: Complex64) {
        let n = self.degree() as isize;
        assert!(k.abs() <= n, "frequency {k} outside degree {n}");
        self.coeffs[(k + n) as usize] = c;
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Direct summation of `sum_k c_k e^{ikt}`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let n = self.degree() as isize;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::cis((i as isize - n) as f64 * t))
            .sum()
    }

    /// The map `z -> 1/z`.
    pub fn reverse(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            coeffs,
            parity: self.parity,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            parity: self.parity,
        }
    }

    /// Returns `self + other` at the larger degree. The result keeps the
    /// common parity, or [`Parity::None`] if they differ.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.degree().max(other.degree()) as isize;
        let coeffs = (-n..=n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        let parity = if self.parity == other.parity {
            self.parity
        } else {
            Parity::None
        };
        Self { coeffs, parity }
    }

    /// Drops frequencies above `degree`, returning the largest dropped magnitude.
    pub fn truncated(&self, degree: usize) -> (Self, f64) {
        let n = self.degree();
        if degree >= n {
            return (self.clone(), 0.0);
        }
        let cut = n - degree;
        let dropped = self.coeffs[..cut]
            .iter()
            .chain(&self.coeffs[self.coeffs.len() - cut..])
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let coeffs = self.coeffs[cut..self.coeffs.len() - cut].to_vec();
        (
            Self {
                coeffs,
                parity: self.parity,
            },
            dropped,
        )
    }

    /// `max_k |c_{-k} - conj(c_k)|`; zero for a real-valued polynomial.
    pub fn realness_defect(&self) -> f64 {
        let n = self.degree() as isize;
        (0..=n)
            .map(|k| (self.coeff(-k) - self.coeff(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Samples at the nodes of `grid`.
    pub fn synthesize(&self, grid: UnitCircleGrid) -> Result<Vec<Complex64>> {
        let n = self.degree();
        let size = grid.size();
        if size < 2 * n + 2 {
            return Err(QspError::Aliasing {
                grid: size,
                degree: n,
                needed: 2 * n + 2,
            });
        }
        let mut bins = vec![Complex64::new(0.0, 0.0); size];
        let ni = n as isize;
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i as isize - ni;
            bins[k.rem_euclid(size as isize) as usize] = *c;
        }
        let fft = FftPlanner::new().plan_fft_inverse(size);
        fft.process(&mut bins);
        Ok(bins)
    }

    /// Sup norm sampled on `oversample * (2n + 2)` nodes. This is a lower
    /// bound on the true sup, tight to `O((n * oversample)^-2)` relative.
    pub fn linf_norm(&self, oversample: usize) -> f64 {
        let oversample = oversample.max(4);
        let grid = UnitCircleGrid {
            size: oversample * (2 * self.degree() + 2),
        };
        self.synthesize(grid)
            .expect("oversampled grid always resolves the degree")
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn analyze_constant() {
        let grid = UnitCircleGrid::new(8).unwrap();
        let s = analyze(&[c(1.0, 0.0); 8], grid).unwrap();
        assert!((s.coeff(0) - c(1.0, 0.0)).norm() < 1e-15);
        for k in -3..=4 {
            if k != 0 {
                assert!(s.coeff(k).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn analyze_single_harmonics() {
        let grid = UnitCircleGrid::new(8).unwrap();
        let cos: Vec<f64> = grid.nodes().map(f64::cos).collect();
        let s = analyze_real(&cos, grid).unwrap();
        for k in -3..=4isize {
            let want = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((s.coeff(k) - c(want, 0.0)).norm() < 1e-15, "k={k}");
        }
        let sin2: Vec<f64> = grid.nodes().map(|t| (2.0 * t).sin()).collect();
        let s = analyze_real(&sin2, grid).unwrap();
        assert!((s.coeff(2) - c(0.0, -0.5)).norm() < 1e-15);
        assert!((s.coeff(-2) - c(0.0, 0.5)).norm() < 1e-15);
        assert!(s.coeff(1).norm() < 1e-15);
    }

    #[test]
    fn analyze_rejects_length_mismatch() {
        let grid = UnitCircleGrid::new(8).unwrap();
        assert!(matches!(
            analyze(&[c(0.0, 0.0); 6], grid),
            Err(QspError::Shape {
                expected: 8,
                actual: 6
            })
        ));
    }

    #[test]
    fn grid_must_be_even() {
        assert!(UnitCircleGrid::new(7).is_err());
        assert!(UnitCircleGrid::new(0).is_err());
    }

    #[test]
    fn synthesize_small_cases() {
        let grid = UnitCircleGrid::new(4).unwrap();
        let one = TrigPoly::constant(c(1.0, 0.0));
        for v in one.synthesize(grid).unwrap() {
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
        let cos = TrigPoly::cos(1, 1.0);
        let vals = cos.synthesize(grid).unwrap();
        for (v, want) in vals.iter().zip([1.0, 0.0, -1.0, 0.0]) {
            assert!((v - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn synthesize_detects_aliasing() {
        let p = TrigPoly::cos(3, 1.0);
        let grid = UnitCircleGrid::new(6).unwrap();
        assert!(matches!(
            p.synthesize(grid),
            Err(QspError::Aliasing { needed: 8, .. })
        ));
    }

    #[test]
    fn eval_cosine() {
        let p = TrigPoly::cos(1, 1.0);
        assert!((p.eval(0.0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(p.eval(PI / 2.0).norm() < 1e-15);
        assert!((p.eval(PI / 3.0) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reverse_maps_z_to_inverse() {
        let mut p = TrigPoly::zero(1, Parity::Odd);
        p.set(1, c(1.0, 0.0));
        let q = p.reverse();
        assert_eq!(q.coeff(-1), c(1.0, 0.0));
        assert_eq!(q.coeff(1), c(0.0, 0.0));

        let mut e = TrigPoly::zero(1, Parity::Odd);
        e.set(1, c(1.0, 0.0));
        e.set(-1, c(0.020008, 0.0));
        let er = e.reverse();
        assert_eq!(er.coeff(-1), c(1.0, 0.0));
        assert_eq!(er.coeff(1), c(0.020008, 0.0));
    }

    #[test]
    fn reverse_of_real_poly_is_conjugate() {
        let p = TrigPoly::cos(2, 0.7).add(&TrigPoly::sin(2, 0.3));
        let r = p.reverse();
        for (a, b) in r.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b.conj()).norm() < 1e-16);
        }
    }

    #[test]
    fn linf_norm_examples() {
        assert!((TrigPoly::cos(1, 1.0).linf_norm(16) - 1.0).abs() < 1e-15);
        assert!((TrigPoly::constant(c(0.3, 0.0)).linf_norm(16) - 0.3).abs() < 1e-15);
        let p = TrigPoly::cos(1, 0.3).add(&TrigPoly::sin(1, 0.4));
        // Sup 0.5 is attained at atan(4/3), between grid nodes; the sampled
        // value sits below it by at most 0.5 * (1 - cos(pi / 64)).
        let n = p.linf_norm(16);
        assert!(n <= 0.5 + 1e-15 && n > 0.5 * (PI / 64.0).cos() - 1e-15, "{n}");
    }

    #[test]
    fn parity_is_checked_structurally() {
        let bad = vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(
            TrigPoly::new(bad, Parity::Odd),
            Err(QspError::ParityMismatch(0))
        ));
        assert!(TrigPoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], Parity::Odd).is_ok());
    }

    #[test]
    fn truncation_reports_dropped_mass() {
        let p = TrigPoly::cos(1, 1.0).add(&TrigPoly::cos(3, 1e-3));
        let (q, dropped) = p.truncated(1);
        assert_eq!(q.degree(), 1);
        assert!((dropped - 5e-4).abs() < 1e-18);
    }
}
