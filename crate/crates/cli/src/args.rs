use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qspfac::completion::{BMode, BSpec, SolveOptions};
use qspfac::pipeline::PipelineOptions;
use qspfac::{Family, Parity, TargetSpec};

#[derive(Debug, Parser)]
#[command(name = "qspfac", version, about = "Phase factors for quantum signal processing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline for one target.
    Run(RunArgs),
    /// Run one family over a list of parameter values.
    Sweep(SweepArgs),
    /// Check a phases file against its target.
    VerifyPhases(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    HamsimRe,
    HamsimIm,
    Filter,
    Matinv,
    Fermidirac,
    CustomSamples,
}

impl FamilyArg {
    pub fn parse_name(name: &str) -> Option<Self> {
        <Self as ValueEnum>::from_str(name, false).ok()
    }

    /// Flag holding the family parameter.
    pub fn param_name(self) -> Option<&'static str> {
        match self {
            FamilyArg::HamsimRe | FamilyArg::HamsimIm => Some("tau"),
            FamilyArg::Filter => Some("delta"),
            FamilyArg::Matinv => Some("kappa"),
            FamilyArg::Fermidirac => Some("beta"),
            FamilyArg::CustomSamples => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BModeArg {
    Leading,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct TargetArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Whitespace-separated samples f(2 pi n / N), n = 0..N-1.
    #[arg(long)]
    pub samples_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub parity: Option<ParityArg>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "leading")]
    pub b_mode: BModeArg,
    #[arg(long, default_value_t = 0.4)]
    pub b_amplitude: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = f64::EPSILON)]
    pub eps_scale: f64,
    /// Hankel rows; defaults to 2d + 2.
    #[arg(long)]
    pub rows_l: Option<usize>,
    #[arg(long, default_value_t = 40)]
    pub ns_factor: usize,
    /// Relative coefficient threshold of the truncation.
    #[arg(long, default_value_t = 1e-12)]
    pub threshold: f64,
    /// Error grid size; defaults to 4(d + 1).
    #[arg(long)]
    pub check_grid: Option<usize>,
}

impl SolverArgs {
    pub fn pipeline_options(&self) -> Result<PipelineOptions> {
        if self.ns_factor < 4 {
            bail!("--ns-factor must be at least 4, got {}", self.ns_factor);
        }
        if !(self.eps_scale > 0.0 && self.eps_scale < 1.0) {
            bail!("--eps-scale must lie in (0, 1), got {}", self.eps_scale);
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            bail!("--threshold must lie in (0, 1), got {}", self.threshold);
        }
        let mode = match self.b_mode {
            BModeArg::Leading => BMode::LeadingOnly,
            BModeArg::Random => BMode::Randomized,
        };
        Ok(PipelineOptions {
            b: BSpec {
                mode,
                amplitude: self.b_amplitude,
                seed: self.seed,
            },
            solve: SolveOptions {
                eps_scale: self.eps_scale,
                seed: self.seed,
                ..SolveOptions::default()
            },
            rows_l: self.rows_l,
            ns_factor: self.ns_factor,
            threshold: self.threshold,
            check_grid: self.check_grid,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Gate on err_linf_rel for the exit code.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Also write the error curve as CSV.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// File stem for the artifacts; derived from the target by default.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Runs executed concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Phases file written by `run`.
    #[arg(long)]
    pub phases: PathBuf,
    /// Target flags override the phases file header.
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Write the error curve to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl TargetArgs {
    pub fn spec(&self) -> Result<TargetSpec> {
        let Some(family) = self.family else {
            bail!("--family is required");
        };
        let need = |v: Option<f64>, flag: &str| v.with_context(|| format!("--{flag} is required for this family"));
        let family = match family {
            FamilyArg::HamsimRe => Family::HamSimRe {
                tau: need(self.tau, "tau")?,
            },
            FamilyArg::HamsimIm => Family::HamSimIm {
                tau: need(self.tau, "tau")?,
            },
            FamilyArg::Filter => Family::Filter {
                delta: need(self.delta, "delta")?,
            },
            FamilyArg::Matinv => Family::MatInv {
                kappa: need(self.kappa, "kappa")?,
            },
            FamilyArg::Fermidirac => Family::FermiDirac {
                beta: need(self.beta, "beta")?,
            },
            FamilyArg::CustomSamples => {
                let path = self
                    .samples_file
                    .as_ref()
                    .context("--samples-file is required for custom-samples")?;
                let parity = self.parity.context("--parity is required for custom-samples")?;
                Family::CustomSamples {
                    samples: crate::files::read_samples(path)?,
                    parity: parity.into(),
                }
            }
        };
        Ok(TargetSpec::new(family)?)
    }

    /// Same family with its parameter replaced by `value`.
    pub fn with_param(family: FamilyArg, value: f64) -> Self {
        let mut t = TargetArgs {
            family: Some(family),
            tau: None,
            delta: None,
            kappa: None,
            beta: None,
            samples_file: None,
            parity: None,
        };
        match family.param_name() {
            Some("tau") => t.tau = Some(value),
            Some("delta") => t.delta = Some(value),
            Some("kappa") => t.kappa = Some(value),
            Some("beta") => t.beta = Some(value),
            _ => {}
        }
        t
    }

    /// Fills unset fields from `key=value` pairs of a phases header.
    pub fn fill_from_header(&mut self, header: &[(String, String)]) -> Result<()> {
        let get = |key: &str| header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let num = |key: &str| -> Result<Option<f64>> {
            get(key)
                .map(|v| v.parse::<f64>().with_context(|| format!("bad {key} in phases header: {v}")))
                .transpose()
        };
        if self.family.is_none() {
            if let Some(name) = get("family") {
                self.family = Some(FamilyArg::parse_name(name).with_context(|| format!("unknown family {name}"))?);
            }
        }
        self.tau = self.tau.or(num("tau")?);
        self.delta = self.delta.or(num("delta")?);
        self.kappa = self.kappa.or(num("kappa")?);
        self.beta = self.beta.or(num("beta")?);
        if self.samples_file.is_none() {
            self.samples_file = get("samples_file").map(PathBuf::from);
        }
        if self.parity.is_none() && self.family == Some(FamilyArg::CustomSamples) {
            self.parity = match get("parity") {
                Some("even") => Some(ParityArg::Even),
                Some("odd") => Some(ParityArg::Odd),
                _ => None,
            };
        }
        Ok(())
    }
}
