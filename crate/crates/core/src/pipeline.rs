//! End-to-end driver: target -> a(t) -> b(t) -> g_k -> m -> (p, r) -> phases.

use std::fmt;
use std::time::Instant;

use crate::approx::{approximate, approximate_from_samples, final_grid_size, scale_exact_polynomial};
use crate::approx::{ApproxOptions, ApproxResult, DEFAULT_NS_FACTOR, DEFAULT_THRESHOLD, TARGET_SUP};
use crate::completion::{complete, compute_ghat, make_b, solve_m, BSpec, CompletionResult, SolveOptions};
use crate::error::QspError;
use crate::peel::{extract_phases, PeelDiagnostics, PhaseFactors};
use crate::target::{Family, TargetSpec};
use crate::trigpoly::TrigPoly;
use crate::verify::{default_check_grid, error_curve, CurvePoint, ReconstructionReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub b: BSpec,
    pub solve: SolveOptions,
    /// Hankel rows `l`; `None` means `2d + 2`.
    pub rows_l: Option<usize>,
    pub ns_factor: usize,
    pub threshold: f64,
    /// Error grid size; `None` means `4(d + 1)`.
    pub check_grid: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            b: BSpec::default(),
            solve: SolveOptions::default(),
            rows_l: None,
            ns_factor: DEFAULT_NS_FACTOR,
            threshold: DEFAULT_THRESHOLD,
            check_grid: None,
        }
    }
}

impl PipelineOptions {
    /// Uses one seed for both `b` and the inverse iteration start.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.b.seed = seed;
        self.solve.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Approx,
    Ghat,
    SolveM,
    Complete,
    Peel,
    Verify,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Approx => "approx",
            Stage::Ghat => "ghat",
            Stage::SolveM => "solve_m",
            Stage::Complete => "complete",
            Stage::Peel => "peel",
            Stage::Verify => "verify",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Wall time per stage in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub approx: f64,
    pub ghat: f64,
    pub solve_m: f64,
    pub complete: f64,
    pub peel: f64,
    pub verify: f64,
}

impl StageTimings {
    pub fn total(&self) -> f64 {
        self.approx + self.ghat + self.solve_m + self.complete + self.peel + self.verify
    }

    fn slot(&mut self, stage: Stage) -> &mut f64 {
        match stage {
            Stage::Approx => &mut self.approx,
            Stage::Ghat => &mut self.ghat,
            Stage::SolveM => &mut self.solve_m,
            Stage::Complete => &mut self.complete,
            Stage::Peel => &mut self.peel,
            Stage::Verify => &mut self.verify,
        }
    }
}

/// Scalar diagnostics gathered along the way; fields fill in as stages pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunDiagnostics {
    pub degree: Option<usize>,
    pub ns: Option<usize>,
    pub tail_bound: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_rel_spread: Option<f64>,
    pub m_residual: Option<f64>,
    pub unitarity_defect: Option<f64>,
    pub outer_iters: Option<usize>,
    pub cg_iters_total: Option<usize>,
    pub max_truncation: Option<f64>,
    pub max_modulus_mismatch: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub approx: ApproxResult,
    pub b: TrigPoly,
    pub completion: CompletionResult,
    pub phases: PhaseFactors,
    pub peel: PeelDiagnostics,
    pub report: ReconstructionReport,
    pub curve: Vec<CurvePoint>,
    pub timings: StageTimings,
    pub diagnostics: RunDiagnostics,
}

impl PipelineOutput {
    pub fn degree(&self) -> usize {
        self.phases.degree()
    }
}

#[derive(Debug, Clone)]
pub struct PipelineError {
    pub stage: Stage,
    pub source: QspError,
    pub timings: StageTimings,
    pub diagnostics: RunDiagnostics,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.source)
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

struct Runner {
    timings: StageTimings,
    diagnostics: RunDiagnostics,
}

impl Runner {
    fn stage<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T, QspError>) -> Result<T, PipelineError> {
        let start = Instant::now();
        let out = f();
        *self.timings.slot(stage) += start.elapsed().as_secs_f64();
        out.map_err(|source| PipelineError {
            stage,
            source,
            timings: self.timings,
            diagnostics: self.diagnostics,
        })
    }
}

/// Builds `a(t)` for a target: truncation for smooth families, exact
/// coefficients for the filter.
pub fn approximate_target(spec: &TargetSpec, opts: &PipelineOptions) -> Result<ApproxResult, QspError> {
    spec.validate()?;
    let parity = spec.parity();
    match &spec.family {
        Family::Filter { .. } => {
            let degree = spec.exact_degree().expect("filter has an exact degree");
            scale_exact_polynomial(spec, degree, parity, TARGET_SUP)
        }
        Family::CustomSamples { samples, .. } => approximate_from_samples(samples, parity, opts.threshold),
        _ => approximate(
            spec,
            parity,
            &ApproxOptions {
                threshold: opts.threshold,
                ns_factor: opts.ns_factor,
                ..ApproxOptions::default()
            },
        ),
    }
}

/// Full pipeline for a target.
pub fn run(spec: &TargetSpec, opts: &PipelineOptions) -> Result<PipelineOutput, PipelineError> {
    let mut runner = Runner {
        timings: StageTimings::default(),
        diagnostics: RunDiagnostics::default(),
    };
    let approx = runner.stage(Stage::Approx, || approximate_target(spec, opts))?;
    runner.diagnostics.degree = Some(approx.degree);
    runner.diagnostics.tail_bound = Some(approx.tail_bound);
    run_from_approx(approx, opts, runner)
}

/// Pipeline from a given `a(t)` onward.
pub fn run_polynomial(a: TrigPoly, opts: &PipelineOptions) -> Result<PipelineOutput, PipelineError> {
    let degree = a.degree();
    let approx = ApproxResult {
        a,
        degree,
        scale: 1.0,
        tail_bound: 0.0,
        grid_size: 0,
    };
    let mut runner = Runner {
        timings: StageTimings::default(),
        diagnostics: RunDiagnostics::default(),
    };
    runner.diagnostics.degree = Some(degree);
    run_from_approx(approx, opts, runner)
}

fn run_from_approx(
    approx: ApproxResult,
    opts: &PipelineOptions,
    mut runner: Runner,
) -> Result<PipelineOutput, PipelineError> {
    let d = approx.degree;
    let ns = final_grid_size(d, opts.ns_factor);
    runner.diagnostics.ns = Some(ns);

    let (b, sys) = runner.stage(Stage::Ghat, || {
        let b = make_b(d, &opts.b)?;
        let sys = compute_ghat(&approx.a, &b, ns, opts.rows_l)?;
        Ok((b, sys))
    })?;

    let nv = runner.stage(Stage::SolveM, || solve_m(&sys, &opts.solve))?;
    runner.diagnostics.outer_iters = Some(nv.outer_iters);
    runner.diagnostics.cg_iters_total = Some(nv.cg_iters_total);
    runner.diagnostics.m_residual = Some(nv.residual);

    let completion = runner.stage(Stage::Complete, || {
        let mut c = complete(&approx.a, &b, &nv.m)?;
        c.diagnostics.m_residual = Some(nv.residual);
        Ok(c)
    })?;
    runner.diagnostics.alpha = Some(completion.alpha);
    runner.diagnostics.alpha_rel_spread = Some(completion.diagnostics.alpha_rel_spread);
    runner.diagnostics.unitarity_defect = Some(completion.diagnostics.unitarity_defect);

    let (phases, peel) = runner.stage(Stage::Peel, || extract_phases(&completion.p, &completion.r))?;
    runner.diagnostics.max_truncation = Some(peel.max_truncation);
    runner.diagnostics.max_modulus_mismatch = Some(peel.max_modulus_mismatch);

    let grid = opts.check_grid.unwrap_or_else(|| default_check_grid(d));
    let (report, curve) = runner.stage(Stage::Verify, || error_curve(&phases, &approx.a, grid))?;

    Ok(PipelineOutput {
        approx,
        b,
        completion,
        phases,
        peel,
        report,
        curve,
        timings: runner.timings,
        diagnostics: runner.diagnostics,
    })
}
