//! Shared inputs for the benchmarks.

use qspfac::completion::{compute_ghat, make_b, BSpec, HankelSystem};
use qspfac::pipeline::approximate_target;
use qspfac::{ApproxResult, Family, TargetSpec};

/// Hamiltonian simulation target, real part, at evolution time `tau`.
pub fn hamsim(tau: f64) -> ApproxResult {
    let spec = TargetSpec::new(Family::HamSimRe { tau }).expect("valid tau");
    approximate_target(&spec, &Default::default()).expect("approximation")
}

/// Hankel system of a benchmark approximation with the default `b`.
pub fn hankel_system(approx: &ApproxResult) -> HankelSystem {
    let d = approx.degree;
    let b = make_b(d, &BSpec::default()).expect("b");
    compute_ghat(&approx.a, &b, 40 * d, None).expect("ghat")
}
