use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lmoment_core::arith::EulerProductConfig;
use lmoment_core::identities::{SuiteOptions, SUITES};
use lmoment_core::lfunction::ShiftPair;
use lmoment_core::moments::{FamilySpec, MomentConfig, DEFAULT_BUDGET};
use lmoment_core::special::PrecisionProfile;
use lmoment_core::transforms::{ContourSpec, KernelCheckConfig, WeightSpec};
use num_complex::Complex64;
use serde::Serialize;

use crate::CliError;

/// Environment variable read for the default worker count.
pub const THREADS_ENV: &str = "LMOMENT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "lmoment", version, about = "Twisted second moments of Dirichlet L-functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = THREADS_ENV, default_value_t = 0)]
    pub threads: usize,

    /// Largest allowed Σ φ*(q) over the family.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    /// Disable the budget guard.
    #[arg(long, global = true)]
    pub override_budget: bool,

    #[arg(long, global = true, default_value_t = PrecisionProfile::default().zeta_series_terms)]
    pub zeta_terms: u32,

    #[arg(long, global = true, default_value_t = PrecisionProfile::default().euler_maclaurin_correction_order)]
    pub em_order: u32,

    #[arg(long, global = true, default_value_t = PrecisionProfile::default().target_abs_error)]
    pub target_error: f64,

    #[arg(long, global = true, default_value_t = EulerProductConfig::default().prime_cutoff)]
    pub prime_cutoff: u64,

    /// Report Euler products without a tail bound.
    #[arg(long, global = true)]
    pub no_tail_estimate: bool,

    #[arg(long, global = true, default_value_t = WeightSpec::default().bump_sharpness)]
    pub bump_sharpness: f64,

    #[arg(long, global = true, default_value_t = WeightSpec::default().quadrature_nodes)]
    pub weight_nodes: usize,

    /// Real part of the line carrying the diagonal integral.
    #[arg(long, global = true, default_value_t = MomentConfig::default().diagonal_contour.real_part)]
    pub diagonal_re: f64,

    /// Smallest height at which the diagonal integral may be truncated.
    #[arg(long, global = true, default_value_t = MomentConfig::default().diagonal_contour.im_cutoff)]
    pub diagonal_cutoff: f64,

    #[arg(long, global = true, default_value_t = MomentConfig::default().diagonal_contour.step)]
    pub diagonal_step: f64,

    #[arg(long, global = true, default_value_t = KernelCheckConfig::default().delta)]
    pub kernel_delta: f64,

    #[arg(long, global = true, default_value_t = KernelCheckConfig::default().contour.im_cutoff)]
    pub kernel_cutoff: f64,

    #[arg(long, global = true, default_value_t = KernelCheckConfig::default().contour.step)]
    pub kernel_step: f64,

    #[arg(long, global = true, default_value_t = KernelCheckConfig::default().xi_nodes)]
    pub kernel_nodes: usize,
}

/// Every numeric knob after defaults are applied.
#[derive(Debug, Clone, Serialize)]
pub struct Knobs {
    pub threads: usize,
    pub budget: u64,
    pub override_budget: bool,
    pub precision: PrecisionProfile,
    pub euler: EulerProductConfig,
    pub weight: WeightSpec,
    pub diagonal_contour: ContourSpec,
    pub kernel: KernelCheckConfig,
}

impl CommonArgs {
    pub fn knobs(&self, threads: usize) -> Result<Knobs, CliError> {
        let weight = WeightSpec {
            bump_sharpness: self.bump_sharpness,
            quadrature_nodes: self.weight_nodes,
        };
        weight.validate()?;
        let diagonal_contour = ContourSpec::new(self.diagonal_re, self.diagonal_cutoff, self.diagonal_step)?;
        let kernel = KernelCheckConfig {
            delta: self.kernel_delta,
            contour: ContourSpec::new(0.0, self.kernel_cutoff, self.kernel_step)?,
            xi_nodes: self.kernel_nodes,
        };
        if !(self.target_error > 0.0) {
            return Err(CliError::Config(format!(
                "--target-error must be positive, got {}",
                self.target_error
            )));
        }
        Ok(Knobs {
            threads,
            budget: if self.override_budget { u64::MAX } else { self.budget },
            override_budget: self.override_budget,
            precision: PrecisionProfile {
                zeta_series_terms: self.zeta_terms,
                euler_maclaurin_correction_order: self.em_order,
                target_abs_error: self.target_error,
            },
            euler: EulerProductConfig {
                prime_cutoff: self.prime_cutoff,
                tail_estimate: !self.no_tail_estimate,
            },
            weight,
            diagonal_contour,
            kernel,
        })
    }
}

impl Knobs {
    pub fn moments(&self) -> MomentConfig {
        MomentConfig {
            precision: self.precision,
            euler: self.euler,
            diagonal_contour: self.diagonal_contour,
            budget: self.budget,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suites and report the largest residual of each.
    VerifyIdentities(VerifyArgs),
    /// Brute-force family sum.
    ComputeMoment(FamilyArgs),
    /// Closed-form main terms.
    PredictMoment(FamilyArgs),
    /// Diagonal contribution and its residue cross-check.
    Diagonal(FamilyArgs),
    /// Brute force against every main-term variant.
    Compare(FamilyArgs),
    /// Bilinear form over a coefficient file.
    Sweep(SweepArgs),
    /// One case of the kernel integral identity.
    KernelCheck(KernelArgs),
    /// Orthogonality of even primitive characters modulo one q.
    OrthogonalityCheck(OrthogonalityArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyIdentities(_) => "verify-identities",
            Command::ComputeMoment(_) => "compute-moment",
            Command::PredictMoment(_) => "predict-moment",
            Command::Diagonal(_) => "diagonal",
            Command::Compare(_) => "compare",
            Command::Sweep(_) => "sweep",
            Command::KernelCheck(_) => "kernel-check",
            Command::OrthogonalityCheck(_) => "orthogonality-check",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only these suites (repeatable). Default: all.
    #[arg(long = "suite", value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    pub suites: Vec<String>,

    #[arg(long, default_value_t = SuiteOptions::default().orthogonality_max_q)]
    pub orthogonality_max_q: u64,

    #[arg(long, default_value_t = SuiteOptions::default().orthogonality_max_mn)]
    pub orthogonality_max_mn: u64,

    #[arg(long, default_value_t = SuiteOptions::default().primitive_count_max_q)]
    pub primitive_count_max_q: u64,

    #[arg(long, default_value_t = SuiteOptions::default().functional_equation_max_q)]
    pub functional_equation_max_q: u64,

    #[arg(long, default_value_t = SuiteOptions::default().afe_max_q)]
    pub afe_max_q: u64,

    #[arg(long, default_value_t = SuiteOptions::default().series_terms)]
    pub series_terms: u64,
}

#[derive(Debug, Args)]
pub struct ShiftArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_im: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_im: Option<f64>,

    /// Use (0.9/log Q, 0.4/log Q). Also the default when no shift is given.
    #[arg(long, conflicts_with_all = ["alpha_re", "alpha_im", "beta_re", "beta_im"])]
    pub auto_shifts: bool,
}

impl ShiftArgs {
    pub fn resolve(&self, q: f64) -> Result<ShiftPair, CliError> {
        let explicit = [self.alpha_re, self.alpha_im, self.beta_re, self.beta_im];
        if self.auto_shifts || explicit.iter().all(Option::is_none) {
            return Ok(ShiftPair::auto(q)?);
        }
        let part = |v: Option<f64>| v.unwrap_or(0.0);
        Ok(ShiftPair::new(
            Complex64::new(part(self.alpha_re), part(self.alpha_im)),
            Complex64::new(part(self.beta_re), part(self.beta_im)),
        )?)
    }
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Family scale: moduli run over Q < q < 2Q.
    #[arg(long = "Q")]
    pub scale_q: f64,

    #[arg(long, default_value_t = 1)]
    pub h: u64,

    #[arg(long, default_value_t = 1)]
    pub k: u64,

    #[command(flatten)]
    pub shifts: ShiftArgs,
}

impl FamilyArgs {
    pub fn spec(&self, knobs: &Knobs) -> Result<FamilySpec, CliError> {
        let mut spec = FamilySpec::new(self.scale_q, self.shifts.resolve(self.scale_q)?, self.h, self.k)?;
        spec.weight = knobs.weight;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "Q")]
    pub scale_q: f64,

    /// CSV with header `h,re,im`.
    #[arg(long)]
    pub lambda_file: PathBuf,

    /// Largest admissible index; defaults to the largest index in the file.
    #[arg(long)]
    pub length_bound: Option<u64>,

    #[command(flatten)]
    pub shifts: ShiftArgs,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.5)]
    pub z_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z_im: f64,
    /// Real part of the `w` line, strictly between 0 and Re z.
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct OrthogonalityArgs {
    #[arg(long)]
    pub q: u64,
    /// Check every coprime pair m, n up to this bound.
    #[arg(long, default_value_t = 20)]
    pub max_mn: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}
