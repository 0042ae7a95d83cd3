//! Reconstruction of the signal-processing unitary and accuracy checks.
//!
//! Also hosts the root-finding oracle for the characteristic polynomial. The
//! production path never calls it; tests use it as an independent check.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{QspError, Result};
use crate::peel::PhaseFactors;
use crate::trigpoly::{analyze, Parity, TrigPoly, UnitCircleGrid};

/// 2x2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// `e^{i phi Z}`
fn z_rotation(phi: f64) -> Mat2 {
    let e = Complex64::cis(phi);
    [[e, ZERO], [ZERO, e.conj()]]
}

/// `e^{i t X}`
fn x_rotation(t: f64) -> Mat2 {
    let (s, c) = t.sin_cos();
    let c = Complex64::new(c, 0.0);
    let is = Complex64::new(0.0, s);
    [[c, is], [is, c]]
}

/// `e^{i phi_0 Z} e^{itX} e^{i phi_1 Z} ... e^{itX} e^{i phi_d Z}`.
pub fn reconstruct(phis: &PhaseFactors, t: f64) -> Mat2 {
    let w = x_rotation(t);
    let mut u = z_rotation(phis.phis()[0]);
    for &phi in &phis.phis()[1..] {
        u = mul(&mul(&u, &w), &z_rotation(phi));
    }
    u
}

/// First row `(p, r)` of [`reconstruct`], using row-vector products only.
pub fn reconstruct_row(phis: &[f64], t: f64) -> (Complex64, Complex64) {
    let rot: Vec<Complex64> = phis.iter().map(|&phi| Complex64::cis(phi)).collect();
    row_product(&rot, t)
}

/// [`reconstruct_row`] with `e^{i phi_j}` precomputed.
fn row_product(rot: &[Complex64], t: f64) -> (Complex64, Complex64) {
    let (s, c) = t.sin_cos();
    let (mut p, mut r) = (rot[0], ZERO);
    for e in &rot[1..] {
        // (p, r) [[c, is], [is, c]] diag(e, conj(e))
        let np = Complex64::new(p.re * c - r.im * s, p.im * c + r.re * s);
        let nr = Complex64::new(r.re * c - p.im * s, r.im * c + p.re * s);
        p = np * e;
        r = nr * e.conj();
    }
    (p, r)
}

/// `max |U^* U - I|` entrywise.
pub fn unitarity_defect(u: &Mat2) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let v = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - Complex64::new(id, 0.0)).norm());
        }
    }
    worst
}

/// Coefficients of `p(t)` and `r(t)` for a phase sequence, recovered from
/// samples of the product on a grid that resolves degree `d`.
pub fn qsp_polys(phis: &PhaseFactors) -> Result<(TrigPoly, TrigPoly)> {
    let d = phis.degree();
    let grid = UnitCircleGrid::new(2 * d + 2)?;
    let (pv, rv): (Vec<_>, Vec<_>) = grid.nodes().map(|t| reconstruct_row(phis.phis(), t)).unzip();
    let parity = Parity::of_degree(d);
    let p = analyze(&pv, grid)?.truncate(d, parity)?;
    let r = analyze(&rv, grid)?.truncate(d, parity)?;
    Ok((p, r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionReport {
    /// `||Re p~ - a||_inf / ||a||_inf` over the check grid.
    pub err_linf_rel: f64,
    pub grid_size: usize,
    /// `max | |p~|^2 + |r~|^2 - 1 |`.
    pub max_unitarity_defect: f64,
}

/// One point of the error curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub a: f64,
    pub re_p_tilde: f64,
}

impl CurvePoint {
    pub fn abs_err(&self) -> f64 {
        (self.re_p_tilde - self.a).abs()
    }
}

pub fn default_check_grid(d: usize) -> usize {
    4 * (d + 1)
}

/// Relative sup-norm error of `Re p~` against `a` on `grid_size` points
/// `t_j = pi j / (grid_size - 1)`, i.e. Chebyshev-Lobatto points in `x`.
pub fn error_estimate(phis: &PhaseFactors, a: &TrigPoly, grid_size: usize) -> Result<ReconstructionReport> {
    error_curve(phis, a, grid_size).map(|(rep, _)| rep)
}

/// [`error_estimate`] together with the per-point curve.
pub fn error_curve(
    phis: &PhaseFactors,
    a: &TrigPoly,
    grid_size: usize,
) -> Result<(ReconstructionReport, Vec<CurvePoint>)> {
    let d = phis.degree();
    if grid_size < 2 * (d + 1) {
        return Err(QspError::Config(format!(
            "error grid of {grid_size} points is below 2(d + 1) = {}",
            2 * (d + 1)
        )));
    }
    let step = PI / (grid_size - 1) as f64;
    // t_j = pi j / (G - 1) are the first G nodes of a circle grid of 2(G - 1)
    // points, so a is sampled there by one transform.
    let circle = UnitCircleGrid::new(2 * (grid_size - 1))?;
    let a_vals = if circle.size() >= 2 * a.degree() + 2 {
        a.synthesize(circle)?
    } else {
        circle.nodes().map(|t| a.eval(t)).collect()
    };
    let rot: Vec<Complex64> = phis.phis().iter().map(|&phi| Complex64::cis(phi)).collect();
    let pts: Vec<(CurvePoint, f64)> = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let t = step * j as f64;
            let (p, r) = row_product(&rot, t);
            let point = CurvePoint {
                x: t.cos(),
                a: a_vals[j].re,
                re_p_tilde: p.re,
            };
            (point, (p.norm_sqr() + r.norm_sqr() - 1.0).abs())
        })
        .collect();
    let a_max = pts.iter().fold(0.0f64, |m, (c, _)| m.max(c.a.abs()));
    let err_max = pts.iter().fold(0.0f64, |m, (c, _)| m.max(c.abs_err()));
    let defect = pts.iter().fold(0.0f64, |m, (_, u)| m.max(*u));
    let err_linf_rel = if a_max > 0.0 { err_max / a_max } else { err_max };
    Ok((
        ReconstructionReport {
            err_linf_rel,
            grid_size,
            max_unitarity_defect: defect,
        },
        pts.into_iter().map(|(c, _)| c).collect(),
    ))
}

/// Characteristic polynomial computed the slow way: every root of
/// `z^{2d} (1 - a^2 - b^2)`, selection of those inside the disk, expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCharPoly {
    /// Monic, real, length `2d + 1`.
    pub m: Vec<f64>,
    pub inner_roots: Vec<Complex64>,
    /// Smallest `|1 - |root||`.
    pub min_separation: f64,
    /// Set when a root lies within `1e-8` of the unit circle.
    pub ill_separated: bool,
}

/// Eigenvalues through a bounded real Schur decomposition. Companion
/// matrices with many exact zeros can stall the shifted QR sweep, so a
/// failed attempt is retried after a random orthogonal similarity.
fn companion_eigenvalues(comp: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = comp.nrows();
    let max_iter = 200 * n.max(10);
    if let Some(s) = Schur::try_new(comp.clone(), f64::EPSILON, max_iter) {
        return Ok(s.complex_eigenvalues().iter().copied().collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..4 {
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let q = g.qr().q();
        let rotated = q.transpose() * &comp * &q;
        if let Some(s) = Schur::try_new(rotated, f64::EPSILON, max_iter) {
            return Ok(s.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(QspError::CompletionConsistency(
        "eigenvalue iteration for the oracle did not converge".into(),
    ))
}

pub fn oracle_char_poly(a: &TrigPoly, b: &TrigPoly) -> Result<OracleCharPoly> {
    let d = a.degree().max(b.degree());
    if d == 0 || d > 64 {
        return Err(QspError::Unsupported(format!(
            "oracle is for 1 <= d <= 64, got {d}"
        )));
    }
    // Laurent coefficients of 1 - a^2 - b^2 over -2d..=2d, i.e. polynomial
    // coefficients of z^{2d} (1 - a^2 - b^2) of degree 4d.
    let di = d as isize;
    let mut q = vec![ZERO; 4 * d + 1];
    for i in -di..=di {
        for j in -di..=di {
            let s = a.coeff(i) * a.coeff(j) + b.coeff(i) * b.coeff(j);
            q[(i + j + 2 * di) as usize] -= s;
        }
    }
    q[2 * d] += 1.0;
    let lead = q[4 * d];
    if lead.norm() < 1e-14 {
        return Err(QspError::CompletionConsistency(
            "leading coefficient of 1 - a^2 - b^2 vanishes".into(),
        ));
    }
    let real_coeffs: Vec<f64> = q.iter().map(|c| (c / lead).re).collect();

    // Companion matrix of the monic polynomial.
    let n = 4 * d;
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -real_coeffs[i];
    }
    let eig = companion_eigenvalues(comp)?;

    let horner = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(1.0, 0.0);
        let mut dv = ZERO;
        for &c in real_coeffs[..n].iter().rev() {
            dv = dv * z + v;
            v = v * z + c;
        }
        (v, dv)
    };
    let mut roots: Vec<Complex64> = eig.to_vec();
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = horner(*z);
            if dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 1e-6 {
                break;
            }
            *z -= step;
        }
    }

    let min_separation = roots
        .iter()
        .map(|z| (1.0 - z.norm()).abs())
        .fold(f64::INFINITY, f64::min);
    let inner: Vec<Complex64> = roots.into_iter().filter(|z| z.norm() < 1.0).collect();
    if inner.len() != 2 * d {
        return Err(QspError::CompletionConsistency(format!(
            "expected {} roots inside the unit disk, found {}",
            2 * d,
            inner.len()
        )));
    }
    let mut prod = vec![Complex64::new(1.0, 0.0)];
    for &xi in &inner {
        let mut next = vec![ZERO; prod.len() + 1];
        for (k, &c) in prod.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * xi;
        }
        prod = next;
    }
    let scale = prod.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if let Some(bad) = prod.iter().find(|c| c.im.abs() > 1e-8 * scale) {
        return Err(QspError::CompletionConsistency(format!(
            "oracle polynomial has imaginary coefficient {:.3e}",
            bad.im
        )));
    }
    Ok(OracleCharPoly {
        m: prod.iter().map(|c| c.re).collect(),
        inner_roots: inner,
        min_separation,
        ill_separated: min_separation < 1e-8,
    })
}
