//! Machine-readable run reports.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use qspfac::pipeline::{PipelineError, PipelineOutput, RunDiagnostics, StageTimings};
use qspfac::{Family, TargetSpec};

/// A double written in scientific notation; non-finite values become null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Timings {
    pub approx_ms: u64,
    pub ghat_ms: u64,
    pub solve_m_ms: u64,
    pub complete_ms: u64,
    pub peel_ms: u64,
    pub verify_ms: u64,
    pub total_ms: u64,
    pub wall_ms: u64,
}

fn ms(secs: f64) -> u64 {
    (secs * 1e3).round().max(0.0) as u64
}

impl Timings {
    pub fn new(t: &StageTimings, wall: f64) -> Self {
        Self {
            approx_ms: ms(t.approx),
            ghat_ms: ms(t.ghat),
            solve_m_ms: ms(t.solve_m),
            complete_ms: ms(t.complete),
            peel_ms: ms(t.peel),
            verify_ms: ms(t.verify),
            total_ms: ms(t.total()),
            wall_ms: ms(wall),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub alpha_rel_spread: Option<Sci>,
    pub outer_iters: Option<usize>,
    pub cg_iters_total: Option<usize>,
    pub max_truncation: Option<Sci>,
    pub alpha: Option<Sci>,
    pub m_residual: Option<Sci>,
    pub unitarity_defect: Option<Sci>,
    pub max_modulus_mismatch: Option<Sci>,
    pub tail_bound: Option<Sci>,
}

impl From<&RunDiagnostics> for Diagnostics {
    fn from(d: &RunDiagnostics) -> Self {
        Self {
            alpha_rel_spread: d.alpha_rel_spread.map(Sci),
            outer_iters: d.outer_iters,
            cg_iters_total: d.cg_iters_total,
            max_truncation: d.max_truncation.map(Sci),
            alpha: d.alpha.map(Sci),
            m_residual: d.m_residual.map(Sci),
            unitarity_defect: d.unitarity_defect.map(Sci),
            max_modulus_mismatch: d.max_modulus_mismatch.map(Sci),
            tail_bound: d.tail_bound.map(Sci),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ToleranceExceeded,
    StageFailed,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub family: String,
    pub params: BTreeMap<String, Sci>,
    pub seed: u64,
    pub degree: Option<usize>,
    pub ns: Option<usize>,
    pub timings: Timings,
    pub err_linf_rel: Option<Sci>,
    pub max_unitarity_defect: Option<Sci>,
    pub tol: Sci,
    pub status: Status,
    pub failed_stage: Option<String>,
    pub error: Option<String>,
    pub diagnostics: Diagnostics,
    pub artifacts: BTreeMap<String, String>,
}

pub fn params(spec: &TargetSpec) -> BTreeMap<String, Sci> {
    let mut m = BTreeMap::new();
    match &spec.family {
        Family::HamSimRe { tau } | Family::HamSimIm { tau } => {
            m.insert("tau".into(), Sci(*tau));
        }
        Family::Filter { delta } => {
            m.insert("delta".into(), Sci(*delta));
        }
        Family::MatInv { kappa } => {
            m.insert("kappa".into(), Sci(*kappa));
        }
        Family::FermiDirac { beta } => {
            m.insert("beta".into(), Sci(*beta));
        }
        Family::CustomSamples { samples, .. } => {
            m.insert("samples".into(), Sci(samples.len() as f64));
        }
    }
    m
}

impl RunReport {
    fn base(spec: &TargetSpec, seed: u64, tol: f64) -> Self {
        Self {
            family: spec.name().into(),
            params: params(spec),
            seed,
            degree: None,
            ns: None,
            timings: Timings::default(),
            err_linf_rel: None,
            max_unitarity_defect: None,
            tol: Sci(tol),
            status: Status::StageFailed,
            failed_stage: None,
            error: None,
            diagnostics: Diagnostics::default(),
            artifacts: BTreeMap::new(),
        }
    }

    pub fn success(spec: &TargetSpec, seed: u64, tol: f64, out: &PipelineOutput, wall: f64) -> Self {
        let err = out.report.err_linf_rel;
        Self {
            degree: Some(out.degree()),
            ns: out.diagnostics.ns,
            timings: Timings::new(&out.timings, wall),
            err_linf_rel: Some(Sci(err)),
            max_unitarity_defect: Some(Sci(out.report.max_unitarity_defect)),
            status: if err <= tol {
                Status::Ok
            } else {
                Status::ToleranceExceeded
            },
            diagnostics: (&out.diagnostics).into(),
            ..Self::base(spec, seed, tol)
        }
    }

    pub fn failure(spec: &TargetSpec, seed: u64, tol: f64, err: &PipelineError, wall: f64) -> Self {
        Self {
            degree: err.diagnostics.degree,
            ns: err.diagnostics.ns,
            timings: Timings::new(&err.timings, wall),
            failed_stage: Some(err.stage.to_string()),
            error: Some(err.source.to_string()),
            diagnostics: (&err.diagnostics).into(),
            ..Self::base(spec, seed, tol)
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Ok => 0,
            Status::ToleranceExceeded => 1,
            Status::StageFailed => 3,
        }
    }

    pub fn summary(&self, label: &str) -> String {
        let degree = self.degree.map_or("-".to_string(), |d| d.to_string());
        match self.status {
            Status::StageFailed => format!(
                "{label}: d={degree} FAILED in stage {}: {}",
                self.failed_stage.as_deref().unwrap_or("?"),
                self.error.as_deref().unwrap_or("")
            ),
            _ => format!(
                "{label}: d={degree} err={:.3e} time={} ms {}",
                self.err_linf_rel.map_or(f64::NAN, |e| e.0),
                self.timings.total_ms,
                if self.status == Status::Ok { "ok" } else { "above tolerance" }
            ),
        }
    }
}
