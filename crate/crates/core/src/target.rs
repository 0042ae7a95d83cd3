//! Target functions `f(t) = f(x = cos t)` for the benchmark families.

use std::fmt;

use crate::error::{QspError, Result};
use crate::trigpoly::Parity;

/// A real function of the angle `t`, assumed to depend on `cos t` only.
pub trait TargetFunction: Sync {
    fn eval_t(&self, t: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Sync> TargetFunction for F {
    fn eval_t(&self, t: f64) -> f64 {
        self(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `cos(tau x)`
    HamSimRe { tau: f64 },
    /// `sin(tau x)`
    HamSimIm { tau: f64 },
    /// Eigenstate filter of gap `delta`, built on `T_k` with `k = round(20 / delta)`.
    Filter { delta: f64 },
    /// `(1 - exp(-(5 kappa x)^2)) / x`
    MatInv { kappa: f64 },
    /// `(1 - e^{beta x}) / (1 + e^{beta x})`
    FermiDirac { beta: f64 },
    /// Values of `f(t_n)` on a uniform grid `t_n = 2 pi n / N`.
    CustomSamples { samples: Vec<f64>, parity: Parity },
}

/// A family plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub family: Family,
}

impl TargetSpec {
    pub fn new(family: Family) -> Result<Self> {
        let spec = Self { family };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QspError::Config(msg));
        match &self.family {
            Family::HamSimRe { tau } | Family::HamSimIm { tau } => {
                if !(*tau > 0.0 && tau.is_finite()) {
                    return bad(format!("tau must be positive, got {tau}"));
                }
            }
            Family::Filter { delta } => {
                if !(*delta > 0.0 && *delta < 1.0) {
                    return bad(format!("delta must lie in (0, 1), got {delta}"));
                }
            }
            Family::MatInv { kappa } => {
                if !(*kappa > 1.0 && kappa.is_finite()) {
                    return bad(format!("kappa must exceed 1, got {kappa}"));
                }
            }
            Family::FermiDirac { beta } => {
                if !(*beta > 0.0 && beta.is_finite()) {
                    return bad(format!("beta must be positive, got {beta}"));
                }
            }
            Family::CustomSamples { samples, parity } => {
                if samples.is_empty() || samples.len() % 2 != 0 {
                    return bad(format!(
                        "custom sample count must be even and positive, got {}",
                        samples.len()
                    ));
                }
                if *parity == Parity::None {
                    return bad("custom samples need an even or odd parity".into());
                }
                if samples.iter().any(|v| !v.is_finite()) {
                    return bad("custom samples must be finite".into());
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::HamSimRe { .. } => "hamsim-re",
            Family::HamSimIm { .. } => "hamsim-im",
            Family::Filter { .. } => "filter",
            Family::MatInv { .. } => "matinv",
            Family::FermiDirac { .. } => "fermidirac",
            Family::CustomSamples { .. } => "custom-samples",
        }
    }

    pub fn parity(&self) -> Parity {
        match &self.family {
            Family::HamSimRe { .. } | Family::Filter { .. } => Parity::Even,
            Family::HamSimIm { .. } | Family::MatInv { .. } | Family::FermiDirac { .. } => {
                Parity::Odd
            }
            Family::CustomSamples { parity, .. } => *parity,
        }
    }

    /// Chebyshev index `k` of the filter family.
    pub fn filter_order(delta: f64) -> usize {
        (20.0 / delta).round() as usize
    }

    /// Exact trigonometric degree for families that are already polynomials.
    pub fn exact_degree(&self) -> Option<usize> {
        match self.family {
            Family::Filter { delta } => Some(2 * Self::filter_order(delta)),
            _ => None,
        }
    }

    /// Value of the target in terms of `x`.
    pub fn eval_x(&self, x: f64) -> f64 {
        match &self.family {
            Family::HamSimRe { tau } => (tau * x).cos(),
            Family::HamSimIm { tau } => (tau * x).sin(),
            Family::Filter { delta } => filter(x, *delta),
            Family::MatInv { kappa } => matinv(x, *kappa),
            Family::FermiDirac { beta } => -(0.5 * beta * x).tanh(),
            Family::CustomSamples { .. } => {
                panic!("custom samples are defined on their grid only")
            }
        }
    }

    /// Value of the target at angle `t`.
    pub fn eval_t(&self, t: f64) -> f64 {
        self.eval_x(t.cos())
    }

    /// Label for file headers, e.g. `hamsim-re tau=1000`.
    pub fn describe(&self) -> String {
        match &self.family {
            Family::HamSimRe { tau } | Family::HamSimIm { tau } => {
                format!("{} tau={tau}", self.name())
            }
            Family::Filter { delta } => format!("{} delta={delta}", self.name()),
            Family::MatInv { kappa } => format!("{} kappa={kappa}", self.name()),
            Family::FermiDirac { beta } => format!("{} beta={beta}", self.name()),
            Family::CustomSamples { samples, parity } => {
                format!("{} n={} parity={parity}", self.name(), samples.len())
            }
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl TargetFunction for TargetSpec {
    fn eval_t(&self, t: f64) -> f64 {
        TargetSpec::eval_t(self, t)
    }
}

/// Chebyshev polynomial `T_k(y)` for any real `y`. Outside `[-1, 1]` the
/// cosh form is used.
pub fn chebyshev_t(k: usize, y: f64) -> f64 {
    let kf = k as f64;
    if y.abs() <= 1.0 {
        (kf * y.acos()).cos()
    } else {
        let sign = if y < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sign * (kf * y.abs().acosh()).cosh()
    }
}

/// `log |T_k(y)|` for `|y| >= 1`, without overflow.
fn log_chebyshev_outside(k: usize, y: f64) -> f64 {
    let s = k as f64 * y.abs().acosh();
    // log cosh s = s + log((1 + e^{-2s}) / 2)
    s + (-2.0 * s).exp().ln_1p() - std::f64::consts::LN_2
}

fn filter(x: f64, delta: f64) -> f64 {
    let k = TargetSpec::filter_order(delta);
    let d2 = delta * delta;
    let arg = -1.0 + 2.0 * (x * x - d2) / (1.0 - d2);
    let arg0 = -1.0 - 2.0 * d2 / (1.0 - d2);
    let sign0 = if k % 2 == 1 { -1.0 } else { 1.0 };
    let log_den = log_chebyshev_outside(k, arg0);
    if arg.abs() <= 1.0 {
        sign0 * chebyshev_t(k, arg) * (-log_den).exp()
    } else {
        let sign = if arg < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sign * sign0 * (log_chebyshev_outside(k, arg) - log_den).exp()
    }
}

fn matinv(x: f64, kappa: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let u = 5.0 * kappa * x;
    -(-(u * u)).exp_m1() / x
}
