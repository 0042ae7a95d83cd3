//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any gating criterion fails.
//!
//! The stretch run (matinv, kappa = 1024) is skipped unless
//! `QSPFAC_STRETCH=1` is set.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qspfac::completion::{compute_ghat, hankel_matvec, make_b, solve_m, BSpec, HankelSystem, SolveOptions};
use qspfac::pipeline::{self, PipelineOptions, PipelineOutput};
use qspfac::target::chebyshev_t;
use qspfac::verify::{error_estimate, oracle_char_poly, qsp_polys, reconstruct};
use qspfac::{approximate, extract_phases, ApproxOptions, Family, Parity, PhaseFactors, TargetSpec, TrigPoly};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_a(rng: &mut ChaCha8Rng, d: usize, sup: f64) -> TrigPoly {
    let parity = Parity::of_degree(d);
    let mut a = TrigPoly::zero(d, parity);
    for k in (0..=d).filter(|k| parity.admits(*k as isize)) {
        let c: f64 = rng.random_range(-1.0..1.0);
        let c = if k == d { c.signum() * (0.5 + c.abs()) } else { c };
        if k == 0 {
            a.set(0, Complex64::new(c, 0.0));
        } else {
            a.set(k as isize, Complex64::new(c / 2.0, 0.0));
            a.set(-(k as isize), Complex64::new(c / 2.0, 0.0));
        }
    }
    let norm = a.linf_norm(16);
    a.scale(Complex64::new(sup / norm, 0.0))
}

fn benchmark_specs() -> Vec<TargetSpec> {
    [
        Family::HamSimRe { tau: 1000.0 },
        Family::HamSimIm { tau: 1000.0 },
        Family::Filter { delta: 0.08 },
        Family::MatInv { kappa: 16.0 },
        Family::FermiDirac { beta: 100.0 },
    ]
    .into_iter()
    .map(|f| TargetSpec::new(f).unwrap())
    .collect()
}

fn criterion_1(runs: &[(TargetSpec, Result<PipelineOutput, String>)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (spec, run) in runs {
        match run {
            Ok(out) => {
                let err = out.report.err_linf_rel;
                pass &= err <= 1e-10;
                if let Family::Filter { .. } = spec.family {
                    pass &= out.degree() == 500;
                }
                parts.push(format!(
                    "{} d={} err={:.2e} t={:.1}s",
                    spec.name(),
                    out.degree(),
                    err,
                    out.timings.total()
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", spec.name()));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut skipped = 0;
    for i in 0..100u64 {
        let d = rng.random_range(1..=20);
        let a = random_a(&mut rng, d, 0.3);
        let b = make_b(
            d,
            &BSpec {
                seed: i,
                ..BSpec::default()
            },
        )
        .unwrap();
        let oracle = oracle_char_poly(&a, &b).unwrap();
        if oracle.ill_separated {
            skipped += 1;
            continue;
        }
        let sys = compute_ghat(&a, &b, 40 * (d + 1), None).unwrap();
        let nv = solve_m(&sys, &SolveOptions { seed: i, ..Default::default() }).unwrap();
        let diff = nv.m.iter().zip(&oracle.m).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        worst = worst.max(diff);
    }
    outcome(
        worst <= 1e-8 && skipped == 0,
        format!("max coefficient diff {worst:.2e} over 100 instances, {skipped} ill-separated"),
    )
}

fn criterion_3() -> Outcome {
    let out = pipeline::run_polynomial(TrigPoly::cos(1, 0.3), &PipelineOptions::default());
    let out = match out {
        Ok(o) => o,
        Err(e) => return outcome(false, e.to_string()),
    };
    let m = &out.completion.m;
    let m_err = (m[0] - 0.020008).abs().max(m[1].abs()).max((m[2] - 1.0).abs());
    let a_err = (out.completion.alpha - 0.874650).abs();
    let err = out.report.err_linf_rel;
    outcome(
        m_err <= 1e-5 && a_err <= 1e-5 && err <= 1e-12,
        format!(
            "m=({:.6}, {:.1e}, {}) alpha={:.6} err={err:.2e}",
            m[0], m[1], m[2], out.completion.alpha
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for d in [1usize, 10, 100] {
        let phis = PhaseFactors::new(vec![0.0; d + 1]).unwrap();
        for j in 0..1000 {
            let x = -1.0 + 2.0 * j as f64 / 999.0;
            let u = reconstruct(&phis, x.acos());
            worst = worst.max((u[0][0].re - chebyshev_t(d, x)).abs());
        }
    }
    outcome(worst <= 1e-13, format!("max |Re U_00 - T_d| = {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..50 {
        let d = rng.random_range(1..=64);
        // The top coefficients of (p, r) scale like prod cos(phi_j). Peeling
        // loses accuracy geometrically once they fall near 1e-3, so inner
        // angles are drawn where they stay around 0.1, as the completions
        // produced by the pipeline do.
        let phis: Vec<f64> = (0..=d)
            .map(|j| if j == 0 { rng.random_range(-PI..PI) } else { rng.random_range(-PI / 8.0..PI / 8.0) })
            .collect();
        let phis = PhaseFactors::new(phis).unwrap();
        let (p, r) = qsp_polys(&phis).unwrap();
        let a = TrigPoly::new(
            (-(d as isize)..=d as isize)
                .map(|k| Complex64::new(0.5 * (p.coeff(k) + p.coeff(-k).conj()).re, 0.0))
                .collect(),
            p.parity(),
        )
        .unwrap();
        match extract_phases(&p, &r) {
            Ok((back, _)) => {
                let rep = error_estimate(&back, &a, 4 * (d + 1)).unwrap();
                worst = worst.max(rep.err_linf_rel);
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        worst <= 1e-10 && failures == 0,
        format!("max err {worst:.2e} over 50 sequences, {failures} extraction failures"),
    )
}

fn criterion_6(runs: &[(TargetSpec, Result<PipelineOutput, String>)]) -> Outcome {
    let mut unit = 0.0f64;
    let mut spread = 0.0f64;
    let mut ok = true;
    for (_, run) in runs {
        match run {
            Ok(out) => {
                unit = unit
                    .max(out.report.max_unitarity_defect)
                    .max(out.completion.diagnostics.unitarity_defect);
                spread = spread.max(out.completion.diagnostics.alpha_rel_spread);
            }
            Err(_) => ok = false,
        }
    }
    outcome(
        ok && unit <= 1e-9 && spread <= 1e-8,
        format!("max unitarity defect {unit:.2e}, max alpha spread {spread:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let d = rng.random_range(1..=200);
        let cols = 2 * d + 1;
        let rows = cols + rng.random_range(0..=4);
        let ghat: Vec<f64> = (0..rows + cols - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sys = HankelSystem::new(ghat, rows, cols).unwrap();
        let transpose = i % 2 == 1;
        let n_in = if transpose { rows } else { cols };
        let v: Vec<f64> = (0..n_in).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = hankel_matvec(&sys, &v, transpose).unwrap();
        let dense = sys.to_dense();
        let exact: Vec<f64> = if transpose {
            (0..cols).map(|j| (0..rows).map(|r| dense[r][j] * v[r]).sum()).collect()
        } else {
            dense.iter().map(|row| row.iter().zip(&v).map(|(h, x)| h * x).sum()).collect()
        };
        let scale = exact.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let diff = fast.iter().zip(&exact).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        worst = worst.max(diff / scale);
    }
    outcome(worst <= 1e-13, format!("max relative diff {worst:.2e} over 200 systems"))
}

fn singular_ratio(sys: &HankelSystem) -> f64 {
    let dense = sys.to_dense();
    let m = DMatrix::from_fn(sys.rows(), sys.cols(), |i, j| dense[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let n = s.len();
    // Both vanishing means a null space of dimension two or more: no gap.
    if s[n - 2] == 0.0 {
        1.0
    } else {
        s[n - 1] / s[n - 2]
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_with_b = 0.0f64;
    for _ in 0..10 {
        let d = rng.random_range(1..=40);
        let a = random_a(&mut rng, d, 0.3);
        let b = make_b(d, &BSpec::default()).unwrap();
        let sys = compute_ghat(&a, &b, 40 * (d + 1), None).unwrap();
        worst_with_b = worst_with_b.max(singular_ratio(&sys));
    }
    let spec = TargetSpec::new(Family::FermiDirac { beta: 4.0 }).unwrap();
    let approx = approximate(&spec, spec.parity(), &ApproxOptions::default()).unwrap();
    let d = approx.degree;
    let zero_b = TrigPoly::zero(d, Parity::of_degree(d));
    let sys = compute_ghat(&approx.a, &zero_b, 40 * (d + 1), None).unwrap();
    let without_b = singular_ratio(&sys);
    outcome(
        worst_with_b <= 1e-6 && without_b > 1e-3 && d <= 40,
        format!("leading-only b: max ratio {worst_with_b:.2e}; b = 0 (fermidirac d={d}): ratio {without_b:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut times = Vec::new();
    let mut degrees = Vec::new();
    for tau in [250.0, 500.0, 1000.0] {
        let spec = TargetSpec::new(Family::HamSimRe { tau }).unwrap();
        // Best of three to damp scheduler noise.
        let mut best = f64::INFINITY;
        let mut degree = 0;
        for _ in 0..3 {
            let start = Instant::now();
            let out = pipeline::run(&spec, &PipelineOptions::default());
            best = best.min(start.elapsed().as_secs_f64());
            degree = out.map(|o| o.degree()).unwrap_or(0);
        }
        times.push(best);
        degrees.push(degree);
    }
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = ratios.iter().all(|r| (3.0..=6.0).contains(r));
    outcome(
        pass,
        format!(
            "degrees {degrees:?}, times {:.2}s {:.2}s {:.2}s, ratios {:.2} {:.2} (soft)",
            times[0], times[1], times[2], ratios[0], ratios[1]
        ),
    )
}

fn criterion_10() -> Outcome {
    let spec = TargetSpec::new(Family::MatInv { kappa: 1024.0 }).unwrap();
    match pipeline::run(&spec, &PipelineOptions::default()) {
        Ok(out) => outcome(
            out.phases.phis().len() > 50000 && out.report.err_linf_rel <= 1e-9,
            format!(
                "{} phases, err {:.2e}, {:.0}s",
                out.phases.phis().len(),
                out.report.err_linf_rel,
                out.timings.total()
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let runs: Vec<_> = benchmark_specs()
        .into_iter()
        .map(|spec| {
            let out = pipeline::run(&spec, &PipelineOptions::default()).map_err(|e| e.to_string());
            (spec, out)
        })
        .collect();

    let mut gating_failed = false;
    let mut report = |id: &str, title: &str, soft: bool, o: Outcome| {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let tag = if soft { " (not gating)" } else { "" };
        println!("criterion {id:>2} [{title}]: {status}{tag}  {}", o.detail);
        if !o.pass && !soft {
            gating_failed = true;
        }
    };
    report("1", "four families", false, criterion_1(&runs));
    report("2", "oracle equivalence", false, criterion_2());
    report("3", "degree-one example", false, criterion_3());
    report("4", "Chebyshev identity", false, criterion_4());
    report("5", "round-trip", false, criterion_5());
    report("6", "unitarity and alpha", false, criterion_6(&runs));
    report("7", "Hankel matvec", false, criterion_7());
    report("8", "spectral gap", false, criterion_8());
    report("9", "scaling", true, criterion_9());
    if std::env::var("QSPFAC_STRETCH").as_deref() == Ok("1") {
        report("10", "stretch", true, criterion_10());
    } else {
        println!("criterion 10 [stretch]: SKIP (not gating)  set QSPFAC_STRETCH=1 to run matinv kappa=1024");
    }

    if gating_failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
