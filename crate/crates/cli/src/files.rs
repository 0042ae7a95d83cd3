//! Plain-text artifacts: samples in, phases and error curves out.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

use qspfac::verify::CurvePoint;
use qspfac::PhaseFactors;

/// Whitespace- or comma-separated numbers; `#` starts a comment.
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: f64 = tok
                .parse()
                .with_context(|| format!("{}:{}: not a number: {tok}", path.display(), i + 1))?;
            out.push(v);
        }
    }
    Ok(out)
}

/// One angle per line with 17 significant digits, after a `#` header line.
pub fn write_phases(path: &Path, phases: &PhaseFactors, header: &[(String, String)]) -> Result<()> {
    let mut text = String::from("#");
    for (k, v) in header {
        text.push_str(&format!(" {k}={v}"));
    }
    text.push('\n');
    for phi in phases.phis() {
        text.push_str(&format!("{phi:.16e}\n"));
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub struct PhasesFile {
    pub header: Vec<(String, String)>,
    pub phases: PhaseFactors,
}

pub fn read_phases(path: &Path) -> Result<PhasesFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut header = Vec::new();
    let mut phis = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            header.extend(
                rest.split_whitespace()
                    .filter_map(|kv| kv.split_once('='))
                    .map(|(k, v)| (k.to_string(), v.to_string())),
            );
        } else if !line.is_empty() {
            let v: f64 = line
                .parse()
                .with_context(|| format!("{}:{}: not an angle: {line}", path.display(), i + 1))?;
            phis.push(v);
        }
    }
    if let Some((_, d)) = header.iter().find(|(k, _)| k == "degree") {
        let d: usize = d.parse().with_context(|| format!("bad degree in header: {d}"))?;
        if d + 1 != phis.len() {
            bail!("header says degree {d} but the file holds {} angles", phis.len());
        }
    }
    Ok(PhasesFile {
        header,
        phases: PhaseFactors::new(phis)?,
    })
}

pub fn write_curve(path: &Path, curve: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(["x", "a", "re_p_tilde", "abs_err"])?;
    for pt in curve {
        w.write_record([
            format!("{:e}", pt.x),
            format!("{:e}", pt.a),
            format!("{:e}", pt.re_p_tilde),
            format!("{:e}", pt.abs_err()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}
