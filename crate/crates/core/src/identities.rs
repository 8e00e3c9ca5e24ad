//! Numerical checks of the exact identities the moment computation rests on.
//! Each suite reports its largest residual next to the tolerance it must meet.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    euler_p, euler_phi, factorize, gcd, phi_cap, phi_star, r_factor, EulerProductConfig, FactoredInt, PrimeSieve,
};
use crate::characters::{build_group, enumerate_characters, orthogonality_formula, root_number};
use crate::error::{Error, Result};
use crate::lfunction::{completed_lambda_from, HurwitzTable, ShiftPair};
use crate::moments::{AfePlan, DEFAULT_V_TOL};
use crate::special::{riemann_zeta, PrecisionProfile};
use crate::transforms::{kernel_identity_check, mellin_w, KernelCheckConfig, WeightSpec};

/// Names accepted by `run_suite`.
pub const SUITES: [&str; 8] = [
    "even_primitive_orthogonality",
    "primitive_count",
    "functional_equation",
    "approximate_functional_equation",
    "kernel_integral_identity",
    "coprime_phi_star_series",
    "phi_inverse_series",
    "mellin_shift",
];

/// Sizes of the suites; the defaults are the full ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub orthogonality_max_q: u64,
    pub orthogonality_max_mn: u64,
    pub primitive_count_max_q: u64,
    pub functional_equation_max_q: u64,
    pub afe_max_q: u64,
    /// Length of the direct sums in the two series suites.
    pub series_terms: u64,
    pub precision: PrecisionProfile,
    pub euler: EulerProductConfig,
    pub kernel: KernelCheckConfig,
    pub weight: WeightSpec,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            orthogonality_max_q: 200,
            orthogonality_max_mn: 20,
            primitive_count_max_q: 500,
            functional_equation_max_q: 100,
            afe_max_q: 100,
            series_terms: 1_000_000,
            precision: PrecisionProfile::default(),
            euler: EulerProductConfig::default(),
            kernel: KernelCheckConfig::default(),
            weight: WeightSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: u64,
    /// Largest residual over the cases. For suites whose bound varies per
    /// case this is the largest `residual / bound`, so it is compared with 1.
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime_seconds: f64,
}

struct Outcome {
    cases: u64,
    max_residual: f64,
    tolerance: f64,
}

fn fold(mut acc: Outcome, r: f64) -> Outcome {
    acc.cases += 1;
    // NaN must fail
    if !(r <= acc.max_residual) {
        acc.max_residual = r;
    }
    acc
}

fn outcome(tolerance: f64, residuals: impl IntoIterator<Item = f64>) -> Outcome {
    residuals.into_iter().fold(
        Outcome {
            cases: 0,
            max_residual: 0.0,
            tolerance,
        },
        fold,
    )
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteResult> {
    let start = Instant::now();
    let out = match name {
        "even_primitive_orthogonality" => orthogonality(opts)?,
        "primitive_count" => primitive_count(opts)?,
        "functional_equation" => functional_equation(opts)?,
        "approximate_functional_equation" => approximate_functional_equation(opts)?,
        "kernel_integral_identity" => kernel(opts)?,
        "coprime_phi_star_series" => coprime_phi_star_series(opts)?,
        "phi_inverse_series" => phi_inverse_series(opts)?,
        "mellin_shift" => mellin_shift(opts)?,
        _ => return Err(Error::Invalid(format!("unknown identity suite {name:?}"))),
    };
    Ok(SuiteResult {
        name: name.to_string(),
        cases: out.cases,
        max_residual: out.max_residual,
        tolerance: out.tolerance,
        passed: out.cases > 0 && out.max_residual <= out.tolerance,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_all(opts: &SuiteOptions) -> Result<Vec<SuiteResult>> {
    SUITES.iter().map(|name| run_suite(name, opts)).collect()
}

/// Enumerated `Σ χ(m) χ̄(n)` over even primitive χ against the divisor-sum formula.
fn orthogonality(opts: &SuiteOptions) -> Result<Outcome> {
    let per_q: Result<Vec<Vec<f64>>> = (1..=opts.orthogonality_max_q)
        .into_par_iter()
        .map(|q| {
            let fq = FactoredInt::new(q)?;
            let chars = enumerate_characters(&build_group(&fq)?, true, true);
            let mut out = Vec::new();
            for m in 1..=opts.orthogonality_max_mn {
                for n in 1..=opts.orthogonality_max_mn {
                    if gcd(m * n, q) != 1 {
                        continue;
                    }
                    let sum: Complex64 = chars.iter().map(|c| c.value(m) * c.value(n).conj()).sum();
                    let formula = orthogonality_formula(&fq, m, n)?.to_f64();
                    out.push((sum - formula).norm());
                }
            }
            Ok(out)
        })
        .collect();
    Ok(outcome(1e-9, per_q?.into_iter().flatten()))
}

/// Number of primitive characters against `φ*(q)`; the residual is the count difference.
fn primitive_count(opts: &SuiteOptions) -> Result<Outcome> {
    let diffs: Result<Vec<f64>> = (1..=opts.primitive_count_max_q)
        .into_par_iter()
        .map(|q| {
            let fq = FactoredInt::new(q)?;
            let n = enumerate_characters(&build_group(&fq)?, false, true).len() as i64;
            Ok((n - phi_star(&fq) as i64).abs() as f64)
        })
        .collect();
    Ok(outcome(0.0, diffs?))
}

/// Shifts from the central point at which the functional equation is checked.
pub const FE_POINTS: [Complex64; 3] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.05, 0.0),
    Complex64::new(0.1, 0.2),
];

/// Per even primitive χ: `||ε(χ)| - 1|` (bound 1e-10) and
/// `|Λ(½+s, χ) - ε(χ) Λ(½-s, χ̄)|` (bound 1e-8), reported as residual over bound.
fn functional_equation(opts: &SuiteOptions) -> Result<Outcome> {
    let per_q: Result<Vec<Vec<f64>>> = (3..=opts.functional_equation_max_q)
        .into_par_iter()
        .map(|q| {
            let chars = enumerate_characters(&build_group(&FactoredInt::new(q)?)?, true, true);
            let mut out = Vec::new();
            if chars.is_empty() {
                return Ok(out);
            }
            let tables: Result<Vec<(HurwitzTable, HurwitzTable)>> = FE_POINTS
                .iter()
                .map(|&s| {
                    Ok((
                        HurwitzTable::new(q, 0.5 + s, &opts.precision)?,
                        HurwitzTable::new(q, 0.5 - s, &opts.precision)?,
                    ))
                })
                .collect();
            let tables = tables?;
            for chi in &chars {
                let eps = root_number(chi)?;
                out.push((eps.norm() - 1.0).abs() / 1e-10);
                for (plus, minus) in &tables {
                    let lhs = completed_lambda_from(plus, chi, false)?;
                    let rhs = eps * completed_lambda_from(minus, chi, true)?;
                    out.push((lhs - rhs).norm() / 1e-8);
                }
            }
            Ok(out)
        })
        .collect();
    Ok(outcome(1.0, per_q?.into_iter().flatten()))
}

/// Shift pairs for the approximate functional equation suite.
pub fn afe_shift_pairs() -> Vec<ShiftPair> {
    vec![
        ShiftPair::real(0.02, 0.01).expect("valid shifts"),
        ShiftPair::new(Complex64::new(0.1, 0.05), Complex64::new(0.03, 0.0)).expect("valid shifts"),
        ShiftPair::new(Complex64::new(-0.04, 0.02), Complex64::new(0.07, -0.03)).expect("valid shifts"),
    ]
}

/// `|S(α,β;χ) + S(-β,-α;χ) - Λ(½+α,χ)Λ(½+β,χ̄)|` over even primitive χ.
fn approximate_functional_equation(opts: &SuiteOptions) -> Result<Outcome> {
    afe_residuals(opts, &afe_shift_pairs()).map(|r| outcome(1e-7, r))
}

pub fn afe_residuals(opts: &SuiteOptions, pairs: &[ShiftPair]) -> Result<Vec<f64>> {
    let mut all = Vec::new();
    for shifts in pairs {
        let plan = AfePlan::new(shifts, DEFAULT_V_TOL, opts.precision)?;
        let per_q: Result<Vec<Vec<f64>>> = (3..=opts.afe_max_q)
            .into_par_iter()
            .map(|q| {
                let chars = enumerate_characters(&build_group(&FactoredInt::new(q)?)?, true, true);
                if chars.is_empty() {
                    return Ok(Vec::new());
                }
                let tables = plan.tables(q)?;
                chars.iter().map(|chi| plan.residual_with(chi, &tables)).collect()
            })
            .collect();
        all.extend(per_q?.into_iter().flatten());
    }
    Ok(all)
}

/// The grid of the kernel suite.
pub fn kernel_grid() -> Vec<(f64, Complex64)> {
    let zs = [
        Complex64::new(0.3, 0.0),
        Complex64::new(0.5, 2.0),
        Complex64::new(0.9, 0.0),
    ];
    [0.1, 0.5, 2.0, 10.0]
        .iter()
        .flat_map(|&r| zs.iter().map(move |&z| (r, z)))
        .collect()
}

fn kernel(opts: &SuiteOptions) -> Result<Outcome> {
    let residuals: Result<Vec<f64>> = kernel_grid()
        .into_iter()
        .map(|(r, z)| kernel_identity_check(r, z, z.re / 2.0, &opts.kernel).map(|k| k.residual))
        .collect();
    Ok(outcome(1e-8, residuals?))
}

/// `φ(n)` for `n <= limit`.
fn phi_table(limit: u64) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=limit).collect();
    for p in PrimeSieve::global()
        .primes()
        .iter()
        .copied()
        .take_while(|&p| p <= limit)
    {
        let mut m = p;
        while m <= limit {
            phi[m as usize] -= phi[m as usize] / p;
            m += p;
        }
    }
    phi
}

/// Worst-case relative rounding of a product over the primes below the cutoff.
fn rounding(cfg: &EulerProductConfig) -> f64 {
    f64::EPSILON * (PrimeSieve::global().prime_count(cfg.prime_cutoff) as f64 + 10.0)
}

/// One comparison of a truncated direct sum with a closed form; `bar` bounds
/// the truncation of both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesCheck {
    pub direct: f64,
    pub closed_form: f64,
    pub bar: f64,
}

impl SeriesCheck {
    pub fn ratio(&self) -> f64 {
        (self.direct - self.closed_form).abs() / self.bar
    }
}

/// `Σ_{q <= N, (q, hk) = 1} φ*(q)/q^{1+w} ζ_q(s)` against `ζ(w)ζ(s)Φ(hk, w)P(hk; w, s)`
/// for real `w, s >= 2`. The omitted `q > N` part is at most `ζ(s) N^{1-w}/(w-1)`.
pub fn coprime_phi_star_check(hk: u64, w: f64, s: f64, opts: &SuiteOptions) -> Result<SeriesCheck> {
    if w < 2.0 || s < 2.0 {
        return Err(Error::Domain("the direct series check needs w, s >= 2".into()));
    }
    let n = opts.series_terms;
    let sieve = PrimeSieve::global();
    if n > sieve.bound() {
        return Err(Error::SieveBound(n, sieve.bound()));
    }
    let zs = riemann_zeta(Complex64::new(s, 0.0), &opts.precision)?.re;
    let terms: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|q| {
            if gcd(q, hk) != 1 {
                return 0.0;
            }
            let fq = factorize(q).expect("q within sieve");
            let ps = phi_star(&fq);
            if ps == 0 {
                return 0.0;
            }
            let zq = zs * phi_cap(&fq, Complex64::new(s, 0.0)).re;
            ps as f64 * (q as f64).powf(-1.0 - w) * zq
        })
        .collect();
    // smallest terms first
    let direct: f64 = terms.iter().rev().sum();
    let fhk = FactoredInt::new(hk)?;
    let (wc, sc) = (Complex64::new(w, 0.0), Complex64::new(s, 0.0));
    let p = euler_p(&fhk, wc, sc, &opts.euler)?;
    let rest = riemann_zeta(wc, &opts.precision)?.re * zs * phi_cap(&fhk, wc).re;
    let tail = zs * (n as f64).powf(1.0 - w) / (w - 1.0);
    Ok(SeriesCheck {
        direct,
        closed_form: rest * p.value.re,
        bar: tail + rest.abs() * p.error + rounding(&opts.euler) * direct.abs(),
    })
}

/// Cases of the coprime `φ*` series suite: `(hk, w, s)`.
pub const PHI_STAR_CASES: [(u64, f64, f64); 4] = [(1, 2.0, 2.0), (1, 2.0, 3.0), (6, 2.0, 2.0), (6, 2.0, 3.0)];

fn coprime_phi_star_series(opts: &SuiteOptions) -> Result<Outcome> {
    let ratios: Result<Vec<f64>> = PHI_STAR_CASES
        .iter()
        .map(|&(hk, w, s)| coprime_phi_star_check(hk, w, s, opts).map(|c| c.ratio()))
        .collect();
    Ok(outcome(1.0, ratios?))
}

/// `Σ_{ℓ <= N, (ℓ, v) = 1} 1/(φ(uℓ) ℓ^s)` against `ζ(1+s) R(s; u, v)/φ(u)`.
///
/// The partial sums of `1/φ(uℓ)` over `(ℓ, v) = 1` grow like `A log x + B`
/// with `A = R(0; u, v)/φ(u)`, so the omitted part is `A N^{-s}/s` up to the
/// fluctuation of the partial sums, which is `O(N^{-1} log N)`; the
/// comparison adds the first and allows `4 A N^{-s} log N / N` for the second.
pub fn phi_inverse_check(u: u64, v: u64, s: f64, opts: &SuiteOptions) -> Result<SeriesCheck> {
    if !(s > 0.0) {
        return Err(Error::Domain("the direct series check needs s > 0".into()));
    }
    let n = opts.series_terms;
    if n > PrimeSieve::global().bound() {
        return Err(Error::SieveBound(n, PrimeSieve::global().bound()));
    }
    let (fu, fv) = (FactoredInt::new(u)?, FactoredInt::new(v)?);
    let phi = phi_table(n);
    let phi_u = euler_phi(&fu);
    let direct: f64 = (1..=n)
        .rev()
        .filter(|&l| gcd(l, v) == 1)
        .map(|l| {
            // φ(uℓ) = φ(u) φ(ℓ) d/φ(d), d = (u, ℓ)
            let d = gcd(u, l);
            let phi_ul = phi_u * phi[l as usize] * d / phi[d as usize];
            1.0 / (phi_ul as f64 * (l as f64).powf(s))
        })
        .sum();
    let sc = Complex64::new(s, 0.0);
    let r = r_factor(sc, &fu, &fv, &opts.euler)?;
    let zeta = riemann_zeta(1.0 + sc, &opts.precision)?.re;
    let closed = zeta * r.value.re / phi_u as f64;
    let a = r_factor(Complex64::new(0.0, 0.0), &fu, &fv, &opts.euler)?.value.re / phi_u as f64;
    let nf = n as f64;
    let tail = a * nf.powf(-s) / s;
    Ok(SeriesCheck {
        direct: direct + tail,
        closed_form: closed,
        bar: 4.0 * a * nf.powf(-s) * nf.ln() / nf + zeta * r.error / phi_u as f64 + rounding(&opts.euler) * direct,
    })
}

/// Cases of the `1/φ` series suite: `(u, v, s)`.
pub fn phi_inverse_cases() -> Vec<(u64, u64, f64)> {
    let mut out = Vec::new();
    for (u, v) in [(1, 1), (2, 3), (4, 15)] {
        for s in [0.5, 1.0, 2.0] {
            out.push((u, v, s));
        }
    }
    out
}

fn phi_inverse_series(opts: &SuiteOptions) -> Result<Outcome> {
    let ratios: Result<Vec<f64>> = phi_inverse_cases()
        .into_iter()
        .map(|(u, v, s)| phi_inverse_check(u, v, s, opts).map(|c| c.ratio()))
        .collect();
    Ok(outcome(1.0, ratios?))
}

/// Points `s` for the Mellin shift suite.
pub const MELLIN_SHIFT_POINTS: [Complex64; 3] = [
    Complex64::new(0.37, 1.9),
    Complex64::new(-0.21, -4.3),
    Complex64::new(0.05, 11.7),
];

/// `|W̃_{α,β}(1-α-β+s) - W̃_{-β,-α}(1+s)|`.
fn mellin_shift(opts: &SuiteOptions) -> Result<Outcome> {
    let mut residuals = Vec::new();
    for shifts in afe_shift_pairs() {
        for &s in &MELLIN_SHIFT_POINTS {
            let a = mellin_w(1.0 - shifts.sum() + s, &shifts, &opts.weight)?;
            let b = mellin_w(1.0 + s, &shifts.reflected(), &opts.weight)?;
            residuals.push((a - b).norm());
        }
    }
    Ok(outcome(1e-11, residuals))
}
