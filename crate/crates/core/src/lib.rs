//! Phase factors for quantum signal processing without polynomial root finding.
//!
//! Given a real target `f` on `[-1, 1]`, the pipeline builds a trigonometric
//! approximation `a(t)`, picks a companion `b(t)` with a dominant top
//! harmonic, recovers the characteristic polynomial of the roots of
//! `1 - a^2 - b^2` inside the unit disk from a Hankel null vector, completes
//! `(a, b)` to the first row `(p, r)` of a unitary, and peels phase factors
//! off one degree at a time.
//!
//! ```
//! use qspfac::{pipeline, TrigPoly};
//!
//! let out = pipeline::run_polynomial(TrigPoly::cos(3, 0.3), &Default::default()).unwrap();
//! assert_eq!(out.phases.phis().len(), 4);
//! assert!(out.report.err_linf_rel < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::result_large_err)]

pub mod approx;
pub mod completion;
pub mod error;
pub mod peel;
pub mod pipeline;
pub mod target;
pub mod trigpoly;
pub mod verify;

pub use approx::{approximate, parity_split, ApproxOptions, ApproxResult};
pub use completion::{
    complete, compute_ghat, hankel_matvec, make_b, solve_m, BMode, BSpec, CompletionResult, HankelSystem,
    SolveOptions,
};
pub use error::{QspError, Result};
pub use peel::{extract_phases, PeelDiagnostics, PhaseFactors};
pub use pipeline::{PipelineError, PipelineOptions, PipelineOutput, Stage};
pub use target::{Family, TargetFunction, TargetSpec};
pub use trigpoly::{analyze, Parity, TrigPoly, UnitCircleGrid};
pub use verify::{error_estimate, oracle_char_poly, reconstruct, ReconstructionReport};
