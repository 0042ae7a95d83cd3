//! Trigonometric approximation of a target by Fourier truncation.
//!
//! The target is sampled on a uniform grid in `t`, transformed, and cut at
//! the smallest frequency `d` (of the requested parity) past which every
//! coefficient sits below `threshold * max |g_k|`. The result is rescaled to
//! sup norm [`TARGET_SUP`].

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{QspError, Result};
use crate::target::TargetFunction;
use crate::trigpoly::{analyze_real, Parity, Spectrum, TrigPoly, UnitCircleGrid, DEFAULT_OVERSAMPLE};

pub const DEFAULT_THRESHOLD: f64 = 1e-12;
pub const TARGET_SUP: f64 = 0.3;
pub const DEFAULT_NS_FACTOR: usize = 40;

/// Relative imaginary residue above which a sampled target is rejected.
const NON_REAL_TOL: f64 = 1e-10;
/// A parity projection this far below the full spectrum is round-off.
const ZERO_PART_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOptions {
    pub threshold: f64,
    pub initial_grid: usize,
    pub grid_cap: usize,
    pub ns_factor: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            initial_grid: 1024,
            grid_cap: 1 << 24,
            ns_factor: DEFAULT_NS_FACTOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    /// Real trigonometric polynomial with `||a||_inf = 0.3`.
    pub a: TrigPoly,
    pub degree: usize,
    /// Factor applied to the target.
    pub scale: f64,
    /// Largest dropped coefficient relative to the largest kept one.
    pub tail_bound: f64,
    /// Size of the grid the coefficients were taken from.
    pub grid_size: usize,
}

/// Splits `f` into `x -> (f(x) + f(-x)) / 2` and `x -> (f(x) - f(-x)) / 2`.
pub fn parity_split<T, F>(f: F) -> (impl Fn(f64) -> T, impl Fn(f64) -> T)
where
    T: Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T + Clone,
{
    let g = f.clone();
    (
        move |x| (f(x) + f(-x)) * 0.5,
        move |x| (g(x) - g(-x)) * 0.5,
    )
}

/// Runs the truncation pipeline on a target given as a function of `t`.
pub fn approximate(
    f: &(impl TargetFunction + ?Sized),
    parity: Parity,
    opts: &ApproxOptions,
) -> Result<ApproxResult> {
    check_parity(parity)?;
    let mut size = opts.initial_grid.max(8);
    size += size % 2;
    let spectrum = loop {
        if size > opts.grid_cap {
            return Err(QspError::DegreeOverflow { cap: opts.grid_cap });
        }
        let spectrum = sample_spectrum(f, size)?;
        if top_quarter_resolved(&spectrum, parity, opts.threshold)? {
            break spectrum;
        }
        size *= 2;
    };
    let mut cut = find_cutoff(&spectrum, parity, opts.threshold)?;

    // Final coefficients come from a grid of ns_factor * d points.
    let mut spectrum = spectrum;
    for _ in 0..3 {
        let final_size = final_grid_size(cut.degree, opts.ns_factor);
        if final_size == spectrum.len() {
            break;
        }
        spectrum = sample_spectrum(f, final_size)?;
        let next = find_cutoff(&spectrum, parity, opts.threshold)?;
        let settled = next.degree <= cut.degree;
        cut = next;
        if settled {
            break;
        }
    }
    finish(&spectrum, parity, cut)
}

/// Truncation pipeline for a target known only through uniform samples.
/// No resampling is possible, so the samples must already resolve `f`.
pub fn approximate_from_samples(
    samples: &[f64],
    parity: Parity,
    threshold: f64,
) -> Result<ApproxResult> {
    check_parity(parity)?;
    let grid = UnitCircleGrid::new(samples.len())?;
    let spectrum = analyze_real(samples, grid)?;
    check_real(&spectrum)?;
    if !top_quarter_resolved(&spectrum, parity, threshold)? {
        return Err(QspError::DegreeOverflow { cap: samples.len() });
    }
    let cut = find_cutoff(&spectrum, parity, threshold)?;
    finish(&spectrum, parity, cut)
}

/// For a target that is already a trigonometric polynomial of known degree:
/// extract its coefficients exactly and multiply by `scale`.
pub fn scale_exact_polynomial(
    f: &(impl TargetFunction + ?Sized),
    degree: usize,
    parity: Parity,
    scale: f64,
) -> Result<ApproxResult> {
    check_parity(parity)?;
    let size = final_grid_size(degree, 4);
    let spectrum = sample_spectrum(f, size)?;
    let max = admitted_max(&spectrum, parity);
    if max == 0.0 {
        return Err(QspError::ZeroTarget);
    }
    let unscaled = real_symmetric(&spectrum, degree, parity)?;
    let tail_bound = dropped_max(&spectrum, parity, degree) / max;
    Ok(ApproxResult {
        a: unscaled.scale(Complex64::new(scale, 0.0)),
        degree,
        scale,
        tail_bound,
        grid_size: size,
    })
}

fn check_parity(parity: Parity) -> Result<()> {
    if parity == Parity::None {
        return Err(QspError::Config("approximation needs an even or odd parity".into()));
    }
    Ok(())
}

/// `ns_factor * d`, rounded up to even and never below the aliasing floor.
pub fn final_grid_size(degree: usize, ns_factor: usize) -> usize {
    let n = (ns_factor * degree).max(2 * degree + 2).max(8);
    n + n % 2
}

fn sample_spectrum(f: &(impl TargetFunction + ?Sized), size: usize) -> Result<Spectrum> {
    let grid = UnitCircleGrid::new(size)?;
    let samples: Vec<f64> = grid.nodes().map(|t| f.eval_t(t)).collect();
    if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(QspError::Config(format!("target returned non-finite value {bad}")));
    }
    let spectrum = analyze_real(&samples, grid)?;
    check_real(&spectrum)?;
    Ok(spectrum)
}

/// A real function of `cos t` has real, symmetric coefficients.
fn check_real(spectrum: &Spectrum) -> Result<()> {
    let max = spectrum.max_abs();
    if max == 0.0 {
        return Ok(());
    }
    let worst = spectrum.bins().iter().map(|c| c.im.abs()).fold(0.0, f64::max) / max;
    if worst > NON_REAL_TOL {
        return Err(QspError::NonRealTarget(worst));
    }
    Ok(())
}

fn admitted_max(spectrum: &Spectrum, parity: Parity) -> f64 {
    let nyq = spectrum.nyquist() as isize;
    let max = (0..=nyq)
        .filter(|&k| parity.admits(k))
        .map(|k| spectrum.coeff(k).norm().max(spectrum.coeff(-k).norm()))
        .fold(0.0, f64::max);
    if max <= ZERO_PART_TOL * spectrum.max_abs() {
        0.0
    } else {
        max
    }
}

fn dropped_max(spectrum: &Spectrum, parity: Parity, degree: usize) -> f64 {
    let nyq = spectrum.nyquist() as isize;
    (degree as isize + 1..=nyq)
        .filter(|&k| parity.admits(k))
        .map(|k| spectrum.coeff(k).norm().max(spectrum.coeff(-k).norm()))
        .fold(0.0, f64::max)
}

fn top_quarter_resolved(spectrum: &Spectrum, parity: Parity, threshold: f64) -> Result<bool> {
    let max = admitted_max(spectrum, parity);
    if max == 0.0 {
        return Err(QspError::ZeroTarget);
    }
    let start = 3 * spectrum.len() / 8;
    Ok(dropped_max(spectrum, parity, start) < threshold * max)
}

#[derive(Debug, Clone, Copy)]
struct Cutoff {
    degree: usize,
    max: f64,
}

fn find_cutoff(spectrum: &Spectrum, parity: Parity, threshold: f64) -> Result<Cutoff> {
    let max = admitted_max(spectrum, parity);
    if max == 0.0 {
        return Err(QspError::ZeroTarget);
    }
    let nyq = spectrum.nyquist();
    let bound = threshold * max;
    let mut degree = 0;
    for k in (0..=nyq).rev() {
        let ki = k as isize;
        if parity.admits(ki) && spectrum.coeff(ki).norm().max(spectrum.coeff(-ki).norm()) >= bound {
            degree = k;
            break;
        }
    }
    if Parity::of_degree(degree) != parity {
        degree += 1;
    }
    if 2 * degree + 2 > spectrum.len() {
        return Err(QspError::DegreeOverflow {
            cap: spectrum.len(),
        });
    }
    Ok(Cutoff { degree, max })
}

/// Coefficients `|k| <= degree` with `c_k = c_{-k}` real; other parity zeroed.
fn real_symmetric(spectrum: &Spectrum, degree: usize, parity: Parity) -> Result<TrigPoly> {
    let mut p = spectrum.truncate(degree, parity)?;
    for k in 0..=degree as isize {
        if parity.admits(k) {
            let v = 0.5 * (spectrum.coeff(k).re + spectrum.coeff(-k).re);
            p.set(k, Complex64::new(v, 0.0));
            p.set(-k, Complex64::new(v, 0.0));
        }
    }
    Ok(p)
}

fn finish(spectrum: &Spectrum, parity: Parity, cut: Cutoff) -> Result<ApproxResult> {
    let unscaled = real_symmetric(spectrum, cut.degree, parity)?;
    let sup = unscaled.linf_norm(DEFAULT_OVERSAMPLE);
    if sup == 0.0 {
        return Err(QspError::ZeroTarget);
    }
    let scale = TARGET_SUP / sup;
    Ok(ApproxResult {
        a: unscaled.scale(Complex64::new(scale, 0.0)),
        degree: cut.degree,
        scale,
        tail_bound: dropped_max(spectrum, parity, cut.degree) / cut.max,
        grid_size: spectrum.len(),
    })
}
