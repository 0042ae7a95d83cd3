//! Completion of `a` to the pair `p = a + i c`, `r = b + i d`.
//!
//! With `g = 1 / (1 - a^2 - b^2)`, the negative-frequency coefficients of `g`
//! obey a linear recurrence whose characteristic polynomial is the monic
//! product over the roots of `1 - a^2 - b^2` inside the unit disk. That
//! polynomial is read off as the null vector of a Hankel matrix
//! ([`solve_m`]), so no root is ever computed. [`complete`] then builds
//! `e(z) = z^{-d} m(z)` and the pair `(c, d)`.

mod hankel;
mod nullvec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use hankel::{hankel_matvec, HankelOperator, HankelSystem};
pub use nullvec::{solve_m, NullVector, SolveOptions, DEFAULT_EPS_SCALE};

use crate::error::{QspError, Result};
use crate::trigpoly::{analyze, Parity, TrigPoly, UnitCircleGrid, DEFAULT_OVERSAMPLE};

pub const DEFAULT_B_AMPLITUDE: f64 = 0.4;

/// Lower bound on `1 - a^2 - b^2` accepted on the sampling grid.
pub const POSITIVITY_FLOOR: f64 = 0.5;

/// Largest alpha spread for which `m` is accepted.
pub const ALPHA_SPREAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BMode {
    /// `b = amplitude * sin(d t)`.
    LeadingOnly,
    /// Leading term plus small random lower harmonics.
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BSpec {
    pub mode: BMode,
    pub amplitude: f64,
    pub seed: u64,
}

impl Default for BSpec {
    fn default() -> Self {
        Self {
            mode: BMode::LeadingOnly,
            amplitude: DEFAULT_B_AMPLITUDE,
            seed: 0,
        }
    }
}

/// `b(t) = b_d sin(dt) + b_{d-2} sin((d-2)t) + ...` with a dominant `b_d`.
///
/// In randomized mode `b_{d-2}, ...` are uniform in `[-A/(4d), A/(4d)]` and
/// the whole of `b` is rescaled if its sampled sup norm exceeds `A`.
pub fn make_b(d: usize, spec: &BSpec) -> Result<TrigPoly> {
    if d == 0 {
        return Err(QspError::Unsupported(
            "degree 0 targets are constants and need no completion".into(),
        ));
    }
    if !(spec.amplitude > 0.0 && spec.amplitude <= 0.5) {
        return Err(QspError::Config(format!(
            "b amplitude must lie in (0, 0.5], got {}",
            spec.amplitude
        )));
    }
    let mut b = TrigPoly::sin(d, spec.amplitude);
    if spec.mode == BMode::Randomized {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let spread = spec.amplitude / (4.0 * d as f64);
        let mut k = d as isize - 2;
        while k >= 1 {
            let bk: f64 = rng.random_range(-spread..=spread);
            b.set(k, Complex64::new(0.0, -bk / 2.0));
            b.set(-k, Complex64::new(0.0, bk / 2.0));
            k -= 2;
        }
        let sup = b.linf_norm(DEFAULT_OVERSAMPLE);
        if sup > spec.amplitude {
            b = b.scale(Complex64::new(spec.amplitude / sup, 0.0));
        }
    }
    Ok(b)
}

/// Samples `g = 1 / (1 - a^2 - b^2)` on `ns` nodes and returns the Hankel
/// system of `g_{-1}, ..., g_{-(2d + l)}`. `rows` defaults to `l = 2d + 2`.
pub fn compute_ghat(a: &TrigPoly, b: &TrigPoly, ns: usize, rows: Option<usize>) -> Result<HankelSystem> {
    let d = a.degree().max(b.degree());
    let cols = 2 * d + 1;
    let rows = rows.unwrap_or(2 * d + 2);
    if rows < cols {
        return Err(QspError::Config(format!(
            "Hankel system needs at least 2d + 1 = {cols} rows, got {rows}"
        )));
    }
    let len = rows + cols - 1;
    let grid = UnitCircleGrid::new(ns)?;
    if ns < 2 * len + 2 {
        return Err(QspError::Aliasing {
            grid: ns,
            degree: len,
            needed: 2 * len + 2,
        });
    }
    let av = a.synthesize(grid)?;
    let bv = b.synthesize(grid)?;
    let mut min = f64::INFINITY;
    let g: Vec<Complex64> = av
        .iter()
        .zip(&bv)
        .map(|(x, y)| {
            let q = 1.0 - x.re * x.re - y.re * y.re;
            min = min.min(q);
            Complex64::new(1.0 / q, 0.0)
        })
        .collect();
    if !(min >= POSITIVITY_FLOOR) {
        return Err(QspError::Scaling { min });
    }
    let spectrum = analyze(&g, grid)?;
    let max = spectrum.max_abs();
    let worst_im = spectrum.bins().iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if worst_im > 1e-13 * max {
        return Err(QspError::CompletionConsistency(format!(
            "g has non-real Fourier coefficients ({:.3e} relative); a and b must be real",
            worst_im / max
        )));
    }
    // With a and b of one parity, g carries even frequencies only.
    let even_only = a.parity() == b.parity() && a.parity() != Parity::None;
    // Entries at the FFT round-off floor carry no information.
    let floor = f64::EPSILON * max;
    let ghat = (1..=len as isize)
        .map(|k| {
            let v = spectrum.coeff(-k).re;
            if (even_only && k % 2 == 1) || v.abs() < floor {
                0.0
            } else {
                v
            }
        })
        .collect();
    HankelSystem::new(ghat, rows, cols)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionDiagnostics {
    /// `max_n |alpha(t_n) - alpha| / alpha`.
    pub alpha_rel_spread: f64,
    /// Prony residual `||H m||_inf / (||g||_inf ||m||_2)`, when known.
    pub m_residual: Option<f64>,
    /// `max_n | |p|^2 + |r|^2 - 1 |` on the check grid.
    pub unitarity_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResult {
    pub p: TrigPoly,
    pub r: TrigPoly,
    pub alpha: f64,
    pub m: Vec<f64>,
    pub diagnostics: CompletionDiagnostics,
}

impl CompletionResult {
    /// Degree `d` of `p` and `r`.
    pub fn degree(&self) -> usize {
        self.p.degree()
    }

    /// Records the Prony residual of `m` against `sys`.
    pub fn with_prony_residual(mut self, sys: &HankelSystem) -> Result<Self> {
        let hm = hankel_matvec(sys, &self.m, false)?;
        let hm_max = hm.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let m_norm = self.m.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.diagnostics.m_residual = Some(hm_max / (sys.max_abs() * m_norm));
        Ok(self)
    }
}

/// Builds `p = a + i c` and `r = b + i d` from the monic polynomial `m`.
pub fn complete(a: &TrigPoly, b: &TrigPoly, m: &[f64]) -> Result<CompletionResult> {
    if m.len() % 2 != 1 || m.len() < 3 {
        return Err(QspError::Shape {
            expected: 2 * a.degree().max(b.degree()) + 1,
            actual: m.len(),
        });
    }
    let d = m.len() / 2;
    if a.degree() > d || b.degree() > d {
        return Err(QspError::Shape {
            expected: 2 * a.degree().max(b.degree()) + 1,
            actual: m.len(),
        });
    }
    if (m[2 * d] - 1.0).abs() > 1e-12 {
        return Err(QspError::CompletionConsistency(format!(
            "m is not monic: leading coefficient {}",
            m[2 * d]
        )));
    }

    // e(z) = z^{-d} m(z), restricted to the parity of d.
    let parity = Parity::of_degree(d);
    let m_scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut e = TrigPoly::zero(d, parity);
    for (j, &mj) in m.iter().enumerate() {
        let k = j as isize - d as isize;
        if parity.admits(k) {
            e.set(k, Complex64::new(mj, 0.0));
        } else if mj.abs() > 1e-8 * m_scale {
            return Err(QspError::CompletionConsistency(format!(
                "m has weight {mj:.3e} at index {j} of the wrong parity"
            )));
        }
    }
    let e_rev = e.reverse();

    let grid = UnitCircleGrid::new((8 * (d + 1)).max(16))?;
    let av = a.synthesize(grid)?;
    let bv = b.synthesize(grid)?;
    let ev = e.synthesize(grid)?;
    let erv = e_rev.synthesize(grid)?;
    let ratios: Vec<f64> = av
        .iter()
        .zip(&bv)
        .zip(ev.iter().zip(&erv))
        .map(|((x, y), (ez, ezi))| (1.0 - x.re * x.re - y.re * y.re) / (ez * ezi).re)
        .collect();
    let alpha = ratios.iter().sum::<f64>() / ratios.len() as f64;
    if !(alpha > 0.0) {
        return Err(QspError::CompletionConsistency(format!(
            "alpha = {alpha:.3e} is not positive"
        )));
    }
    let alpha_rel_spread = ratios.iter().fold(0.0f64, |s, v| s.max((v - alpha).abs())) / alpha;
    if alpha_rel_spread > ALPHA_SPREAD_TOL {
        return Err(QspError::CompletionConsistency(format!(
            "alpha varies by {alpha_rel_spread:.3e} relative over the circle"
        )));
    }

    let sa = alpha.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let c = e.add(&e_rev).scale(Complex64::new(sa / 2.0, 0.0));
    let dpoly = e.add(&e_rev.scale(Complex64::new(-1.0, 0.0))).scale(-i * (sa / 2.0));
    let pad = |q: &TrigPoly| -> TrigPoly {
        if q.degree() == d {
            q.clone()
        } else {
            q.add(&TrigPoly::zero(d, q.parity()))
        }
    };
    let p = pad(a).add(&c.scale(i));
    let r = pad(b).add(&dpoly.scale(i));

    let pv = p.synthesize(grid)?;
    let rv = r.synthesize(grid)?;
    let unitarity_defect = pv
        .iter()
        .zip(&rv)
        .fold(0.0f64, |s, (x, y)| s.max((x.norm_sqr() + y.norm_sqr() - 1.0).abs()));

    Ok(CompletionResult {
        p,
        r,
        alpha,
        m: m.to_vec(),
        diagnostics: CompletionDiagnostics {
            alpha_rel_spread,
            m_residual: None,
            unitarity_defect,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degree_one() -> (TrigPoly, TrigPoly) {
        (TrigPoly::cos(1, 0.3), TrigPoly::sin(1, 0.4))
    }

    fn u() -> f64 {
        25.0 - 624f64.sqrt()
    }

    #[test]
    fn leading_only_b() {
        let b = make_b(1, &BSpec::default()).unwrap();
        assert_eq!(b.coeff(1), Complex64::new(0.0, -0.2));
        assert_eq!(b.coeff(-1), Complex64::new(0.0, 0.2));
        let b3 = make_b(3, &BSpec::default()).unwrap();
        assert_eq!(b3.coeff(1), Complex64::new(0.0, 0.0));
        assert_eq!(b3.coeff(-1), Complex64::new(0.0, 0.0));
        assert_eq!(b3.coeff(3), Complex64::new(0.0, -0.2));
        assert_eq!(b3.parity(), Parity::Odd);
    }

    #[test]
    fn randomized_b_is_deterministic_and_bounded() {
        let spec = BSpec {
            mode: BMode::Randomized,
            amplitude: 0.4,
            seed: 11,
        };
        let b = make_b(4, &spec).unwrap();
        assert_eq!(b, make_b(4, &spec).unwrap());
        assert_eq!(b.parity(), Parity::Even);
        let lead = 2.0 * b.coeff(4).norm();
        let lower = 2.0 * b.coeff(2).norm();
        assert!(lower > 0.0 && lower <= 0.4 / 16.0);
        assert!((0.4 / (1.0 + 1.0 / 16.0)..=0.4).contains(&lead));
        assert!(b.linf_norm(DEFAULT_OVERSAMPLE) <= 0.4 + 1e-15);
        assert!(b.realness_defect() == 0.0);
    }

    #[test]
    fn degree_zero_is_unsupported() {
        assert!(matches!(make_b(0, &BSpec::default()), Err(QspError::Unsupported(_))));
    }

    #[test]
    fn degree_one_fourier_coefficients() {
        let (a, b) = degree_one();
        let sys = compute_ghat(&a, &b, 40, None).unwrap();
        assert_eq!((sys.rows(), sys.cols()), (4, 3));
        let g0 = 1.0 / (0.875f64 * 0.875 - 0.035 * 0.035).sqrt();
        assert!((g0 - 1.143772).abs() < 1e-6);
        let ghat = sys.ghat();
        assert_eq!(ghat[0], 0.0);
        assert!((ghat[1] - (-0.022885)).abs() < 1e-6);
        for (k, &g) in ghat.iter().enumerate() {
            let k = k + 1;
            let want = if k % 2 == 0 { g0 * (-u()).powi(k as i32 / 2) } else { 0.0 };
            assert!((g - want).abs() < 1e-15, "k={k}: {g} vs {want}");
        }
    }

    #[test]
    fn constant_g_gives_zero_hankel() {
        let a = TrigPoly::zero(1, Parity::Odd);
        let b = TrigPoly::zero(1, Parity::Odd);
        let sys = compute_ghat(&a, &b, 40, None).unwrap();
        assert!(sys.ghat().iter().all(|&g| g.abs() < 1e-16));
        assert!(matches!(
            solve_m(&sys, &SolveOptions::default()),
            Err(QspError::Normalization { .. })
        ));
    }

    #[test]
    fn near_singular_g_is_rejected() {
        let a = TrigPoly::cos(1, 0.9);
        let b = TrigPoly::sin(1, 0.4);
        assert!(matches!(compute_ghat(&a, &b, 40, None), Err(QspError::Scaling { .. })));
    }

    #[test]
    fn degree_one_completion() {
        let (a, b) = degree_one();
        let res = complete(&a, &b, &[u(), 0.0, 1.0]).unwrap();
        let alpha = 0.875 / (1.0 + u() * u());
        assert!((res.alpha - alpha).abs() < 1e-15);
        assert!((res.alpha - 0.874650).abs() < 1e-6);
        assert!(res.diagnostics.alpha_rel_spread < 1e-14);
        let sa = alpha.sqrt();
        // c = sqrt(alpha) (1 + u) cos t, d = sqrt(alpha) (1 - u) sin t
        let c1 = sa * (1.0 + u()) / 2.0;
        let d1 = sa * (1.0 - u()) / 2.0;
        assert!((2.0 * c1 - 0.953943).abs() < 1e-5);
        assert!((2.0 * d1 - 0.916513).abs() < 1e-5);
        assert!((res.p.coeff(1) - Complex64::new(0.15, c1)).norm() < 1e-15);
        assert!((res.p.coeff(-1) - Complex64::new(0.15, c1)).norm() < 1e-15);
        // r = b + i d with d = 2 d1 sin t: coefficient of z is -0.2 i + d1
        assert!((res.r.coeff(1) - Complex64::new(d1, -0.2)).norm() < 1e-15);
        assert!((res.r.coeff(-1) - Complex64::new(-d1, 0.2)).norm() < 1e-15);
        assert!(res.diagnostics.unitarity_defect < 1e-10);
    }

    #[test]
    fn wrong_m_fails_alpha_consistency() {
        let (a, b) = degree_one();
        assert!(matches!(
            complete(&a, &b, &[u() * 1.01, 0.0, 1.0]),
            Err(QspError::CompletionConsistency(_))
        ));
    }

    #[test]
    fn roots_at_origin_need_constant_defect() {
        // 1 - a^2 - b^2 = 1 - 0.09 cos^2 - 0.09 sin^2 = 0.91 is constant, so
        // every root sits at the origin and m = z^2.
        let a = TrigPoly::cos(1, 0.3);
        let b = TrigPoly::sin(1, 0.3);
        let res = complete(&a, &b, &[0.0, 0.0, 1.0]).unwrap();
        assert!((res.alpha - 0.91).abs() < 1e-15);
        assert!(res.diagnostics.unitarity_defect < 1e-14);
    }
}
