//! Phase extraction by degree reduction.
//!
//! `(p, r)` is the first row of `e^{i phi_0 Z} e^{itX} ... e^{itX} e^{i phi_d Z}`.
//! The top coefficients satisfy `p_n / r_n = e^{2 i phi_n}`; right-multiplying
//! by `e^{-i phi_n Z} e^{-itX}` strips one factor pair and lowers the degree.

use num_complex::Complex64;

use crate::completion::CompletionResult;
use crate::error::{QspError, Result};
use crate::trigpoly::{Parity, TrigPoly};

/// Above-degree residual beyond which a peel step aborts.
pub const INSTABILITY_TOL: f64 = 1e-6;

/// Largest accepted deviation of the terminal `|p_0|` from one.
pub const TERMINAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFactors {
    phis: Vec<f64>,
}

impl PhaseFactors {
    /// Requires at least one finite angle in `[-pi, pi]`.
    pub fn new(phis: Vec<f64>) -> Result<Self> {
        if phis.is_empty() {
            return Err(QspError::Config("phase factor sequence is empty".into()));
        }
        if let Some(bad) = phis
            .iter()
            .find(|v| !v.is_finite() || v.abs() > std::f64::consts::PI)
        {
            return Err(QspError::Config(format!("phase factor {bad} outside [-pi, pi]")));
        }
        Ok(Self { phis })
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn degree(&self) -> usize {
        self.phis.len() - 1
    }

    pub fn parity(&self) -> Parity {
        Parity::of_degree(self.degree())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PeelDiagnostics {
    /// `max_n ||p_n| - |r_n||` over the steps.
    pub max_modulus_mismatch: f64,
    /// Largest coefficient magnitude dropped when lowering the degree.
    pub max_truncation: f64,
    /// `|r|` left at degree zero.
    pub terminal_r: f64,
}

/// `phi = arg(p_top / r_top) / 2` on the principal branch, with the modulus
/// mismatch `||p_top| - |r_top||`.
pub fn solve_phi(p_top: Complex64, r_top: Complex64) -> Result<(f64, f64)> {
    let (pa, ra) = (p_top.norm(), r_top.norm());
    if !(pa > 0.0) || ra < 1e-3 * pa {
        return Err(QspError::DegenerateLeading {
            degree: 0,
            p_abs: pa,
            r_abs: ra,
        });
    }
    let ratio = p_top / r_top;
    let mut phi = 0.5 * ratio.arg();
    // arg lies in (-pi, pi]; keep phi in (-pi/2, pi/2]
    if phi <= -std::f64::consts::FRAC_PI_2 {
        phi += std::f64::consts::PI;
    }
    Ok((phi, (pa - ra).abs()))
}

/// One reduction `(p, r) <- (p, r) e^{-i phi Z} e^{-itX}` from degree `n` to
/// `n - 1`. Returns the new pair and the largest dropped coefficient.
pub fn peel_step(p: &TrigPoly, r: &TrigPoly, phi: f64, n: usize) -> Result<(TrigPoly, TrigPoly, f64)> {
    if n == 0 || p.degree() > n || r.degree() > n {
        return Err(QspError::Config(format!(
            "peel step at degree {n} got degrees {} and {}",
            p.degree(),
            r.degree()
        )));
    }
    let rot = Complex64::cis(-phi);
    let ni = n as isize;
    // p' = e^{-i phi} p, r' = e^{i phi} r, indexed -n..=n
    let pp: Vec<Complex64> = (-ni..=ni).map(|k| p.coeff(k) * rot).collect();
    let rp: Vec<Complex64> = (-ni..=ni).map(|k| r.coeff(k) * rot.conj()).collect();
    let at = |v: &[Complex64], k: isize| -> Complex64 {
        if k.abs() > ni {
            Complex64::new(0.0, 0.0)
        } else {
            v[(k + ni) as usize]
        }
    };
    // cos t = (z + 1/z) / 2, -i sin t = (1/z - z) / 2
    //   p_new = z (p' - r') / 2 + z^{-1} (p' + r') / 2
    //   r_new = z (r' - p') / 2 + z^{-1} (p' + r') / 2
    let new_p = |k: isize| 0.5 * (at(&pp, k - 1) - at(&rp, k - 1) + at(&pp, k + 1) + at(&rp, k + 1));
    let new_r = |k: isize| 0.5 * (at(&rp, k - 1) - at(&pp, k - 1) + at(&pp, k + 1) + at(&rp, k + 1));

    let dropped = [n as isize + 1, n as isize, -(n as isize), -(n as isize) - 1]
        .into_iter()
        .map(|k| new_p(k).norm().max(new_r(k).norm()))
        .fold(0.0, f64::max);
    if !(dropped <= INSTABILITY_TOL) {
        return Err(QspError::Instability {
            degree: n,
            residual: dropped,
        });
    }

    let m = ni - 1;
    let parity = Parity::of_degree(n - 1);
    let keep = |f: &dyn Fn(isize) -> Complex64| -> Result<TrigPoly> {
        let coeffs = (-m..=m)
            .map(|k| {
                if parity.admits(k) {
                    f(k)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        TrigPoly::new(coeffs, parity)
    };
    Ok((keep(&new_p)?, keep(&new_r)?, dropped))
}

/// Runs the reduction from degree `d` down to zero.
pub fn extract_phases(p: &TrigPoly, r: &TrigPoly) -> Result<(PhaseFactors, PeelDiagnostics)> {
    let d = p.degree().max(r.degree());
    let mut diag = PeelDiagnostics::default();
    let mut phis = vec![0.0; d + 1];
    let mut p = p.clone();
    let mut r = r.clone();
    for n in (1..=d).rev() {
        let ni = n as isize;
        let (phi, mismatch) = solve_phi(p.coeff(ni), r.coeff(ni)).map_err(|e| match e {
            QspError::DegenerateLeading { p_abs, r_abs, .. } => QspError::DegenerateLeading {
                degree: n,
                p_abs,
                r_abs,
            },
            other => other,
        })?;
        diag.max_modulus_mismatch = diag.max_modulus_mismatch.max(mismatch);
        let (np, nr, dropped) = peel_step(&p, &r, phi, n)?;
        diag.max_truncation = diag.max_truncation.max(dropped);
        phis[n] = phi;
        p = np;
        r = nr;
    }
    let p0 = p.coeff(0);
    diag.terminal_r = r.coeff(0).norm();
    if (p0.norm() - 1.0).abs() > TERMINAL_TOL {
        return Err(QspError::CompletionConsistency(format!(
            "terminal |p_0| = {} differs from one",
            p0.norm()
        )));
    }
    phis[0] = p0.arg();
    Ok((PhaseFactors::new(phis)?, diag))
}

/// [`extract_phases`] on the pair held by a completion.
pub fn extract_from_completion(c: &CompletionResult) -> Result<(PhaseFactors, PeelDiagnostics)> {
    extract_phases(&c.p, &c.r)
}
