mod args;
mod files;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, FamilyArg, OutputArgs, RunArgs, SolverArgs, SweepArgs, TargetArgs, VerifyArgs};
use qspfac::pipeline::{self, PipelineOptions};
use qspfac::verify::{default_check_grid, error_curve};
use qspfac::{Family, TargetSpec};
use report::{RunReport, Sci};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::VerifyPhases(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn default_stem(spec: &TargetSpec, target: &TargetArgs) -> String {
    match &spec.family {
        Family::HamSimRe { tau } | Family::HamSimIm { tau } => format!("{}_tau{tau}", spec.name()),
        Family::Filter { delta } => format!("{}_delta{delta}", spec.name()),
        Family::MatInv { kappa } => format!("{}_kappa{kappa}", spec.name()),
        Family::FermiDirac { beta } => format!("{}_beta{beta}", spec.name()),
        Family::CustomSamples { .. } => {
            let file = target
                .samples_file
                .as_deref()
                .and_then(Path::file_stem)
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "samples".into());
            format!("{}_{file}", spec.name())
        }
    }
}

fn phases_header(spec: &TargetSpec, target: &TargetArgs, degree: usize, seed: u64) -> Vec<(String, String)> {
    let mut h = vec![
        ("degree".to_string(), degree.to_string()),
        ("parity".to_string(), spec.parity().to_string()),
        ("family".to_string(), spec.name().to_string()),
    ];
    for (k, v) in report::params(spec) {
        if k != "samples" {
            h.push((k, v.0.to_string()));
        }
    }
    if let Some(path) = target.samples_file.as_ref().and_then(|p| p.to_str()) {
        if !path.chars().any(char::is_whitespace) {
            h.push(("samples_file".into(), path.into()));
        }
    }
    h.push(("seed".into(), seed.to_string()));
    h
}

/// Runs one target and writes its artifacts under `out.out_dir`.
fn execute(
    spec: &TargetSpec,
    target: &TargetArgs,
    opts: &PipelineOptions,
    out: &OutputArgs,
    stem: &str,
) -> Result<RunReport> {
    let seed = opts.solve.seed;
    let start = Instant::now();
    let result = pipeline::run(spec, opts);
    let wall = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&out.out_dir).with_context(|| format!("creating {}", out.out_dir.display()))?;
    let path = |ext: &str| -> PathBuf { out.out_dir.join(format!("{stem}.{ext}")) };
    let mut report = match &result {
        Ok(o) => RunReport::success(spec, seed, out.tol, o, wall),
        Err(e) => RunReport::failure(spec, seed, out.tol, e, wall),
    };
    if let Ok(o) = &result {
        let phases_path = path("phases");
        files::write_phases(&phases_path, &o.phases, &phases_header(spec, target, o.degree(), seed))?;
        report.artifacts.insert("phases".into(), phases_path.display().to_string());
        if out.csv {
            let csv_path = path("curve.csv");
            files::write_curve(&csv_path, &o.curve)?;
            report.artifacts.insert("curve".into(), csv_path.display().to_string());
        }
    }
    let report_path = path("report.json");
    report.artifacts.insert("report".into(), report_path.display().to_string());
    files::write_json(&report_path, &report)?;
    Ok(report)
}

fn cmd_run(a: RunArgs) -> Result<u8> {
    let spec = a.target.spec()?;
    let opts = a.solver.pipeline_options()?;
    let stem = a.name.clone().unwrap_or_else(|| default_stem(&spec, &a.target));
    let report = execute(&spec, &a.target, &opts, &a.output, &stem)?;
    println!("{}", report.summary(&spec.describe()));
    Ok(report.exit_code())
}

fn cmd_sweep(a: SweepArgs) -> Result<u8> {
    if a.family == FamilyArg::CustomSamples {
        anyhow::bail!("sweep needs a parameterized family");
    }
    let opts = a.solver.pipeline_options()?;
    let jobs: Vec<(TargetArgs, TargetSpec)> = a
        .values
        .iter()
        .map(|&v| {
            let t = TargetArgs::with_param(a.family, v);
            let spec = t.spec()?;
            Ok((t, spec))
        })
        .collect::<Result<_>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.max(1))
        .build()
        .context("starting worker threads")?;
    let reports: Vec<Result<RunReport>> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|(t, spec)| execute(spec, t, &opts, &a.output, &default_stem(spec, t)))
            .collect()
    });

    let mut code = 0;
    let mut all = Vec::new();
    for ((_, spec), r) in jobs.iter().zip(reports) {
        let r = r?;
        println!("{}", r.summary(&spec.describe()));
        code = code.max(r.exit_code());
        all.push(r);
    }
    files::write_json(&a.output.out_dir.join("sweep.json"), &all)?;
    Ok(code)
}

#[derive(Serialize)]
struct VerifyReport {
    family: String,
    params: std::collections::BTreeMap<String, Sci>,
    phases_degree: usize,
    target_degree: usize,
    grid_size: usize,
    err_linf_rel: Sci,
    max_unitarity_defect: Sci,
    tol: Sci,
    passed: bool,
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let file = files::read_phases(&a.phases)?;
    let mut target = a.target.clone();
    target.fill_from_header(&file.header)?;
    let spec = target.spec()?;
    let opts = a.solver.pipeline_options()?;
    verify_against(&spec, &opts, &a.solver, &file.phases, a.tol, a.csv.as_deref())
}

fn verify_against(
    spec: &TargetSpec,
    opts: &PipelineOptions,
    solver: &SolverArgs,
    phases: &qspfac::PhaseFactors,
    tol: f64,
    csv: Option<&Path>,
) -> Result<u8> {
    let approx = pipeline::approximate_target(spec, opts)?;
    let d = phases.degree().max(approx.degree);
    let grid = solver.check_grid.unwrap_or_else(|| default_check_grid(d));
    let (rep, curve) = error_curve(phases, &approx.a, grid)?;
    if let Some(path) = csv {
        files::write_curve(path, &curve)?;
    }
    let passed = rep.err_linf_rel <= tol;
    let out = VerifyReport {
        family: spec.name().into(),
        params: report::params(spec),
        phases_degree: phases.degree(),
        target_degree: approx.degree,
        grid_size: rep.grid_size,
        err_linf_rel: Sci(rep.err_linf_rel),
        max_unitarity_defect: Sci(rep.max_unitarity_defect),
        tol: Sci(tol),
        passed,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if passed { 0 } else { 1 })
}
