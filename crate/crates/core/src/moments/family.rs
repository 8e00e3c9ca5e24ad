use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::main_term::main_term_executed;
use super::{CoefficientVector, FamilySpec, MomentConfig};
use crate::arith::{gcd, phi_star, Estimate, FactoredInt};
use crate::characters::{build_group, enumerate_characters, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lfunction::{gamma_factor, HurwitzTable};
use crate::transforms::weight_w;

/// The family sum over all `q`, and over `q` coprime to `hk` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub raw: Estimate,
    pub coprime: Estimate,
    pub character_count: u64,
    pub moduli: u64,
}

/// `Σ φ*(q)` over the moduli of the family.
pub fn family_budget(spec: &FamilySpec) -> Result<u64> {
    spec.moduli()
        .into_iter()
        .map(|q| FactoredInt::new(q).map(|f| phi_star(&f)))
        .sum()
}

struct PerModulus {
    q: u64,
    sum: Complex64,
    error: f64,
    count: u64,
}

/// `Σ_q W(q/Q) Σ^♭_χ Λ(½+α, χ) Λ(½+β, χ̄) twist(χ)` over even primitive χ.
///
/// Each `q` is one task; the per-`q` results are added in ascending `q`, so
/// the value does not depend on the thread count.
fn family_sum<F>(spec: &FamilySpec, cfg: &MomentConfig, coprime_to: u64, twist: F) -> Result<BruteForce>
where
    F: Fn(&DirichletCharacter) -> Complex64 + Sync,
{
    spec.validate()?;
    let required = family_budget(spec)?;
    if required > cfg.budget {
        return Err(Error::Budget {
            required,
            limit: cfg.budget,
        });
    }
    let (alpha, beta) = (spec.shifts.alpha(), spec.shifts.beta());
    let rel = cfg.precision.target_abs_error;
    let moduli = spec.moduli();
    let parts: Result<Vec<PerModulus>> = moduli
        .par_iter()
        .map(|&q| {
            let mut part = PerModulus {
                q,
                sum: Complex64::new(0.0, 0.0),
                error: 0.0,
                count: 0,
            };
            let w = weight_w(q as f64 / spec.scale_q, &spec.weight);
            if w == 0.0 {
                return Ok(part);
            }
            let group = build_group(&FactoredInt::new(q)?)?;
            let chars = enumerate_characters(&group, true, true);
            if chars.is_empty() {
                return Ok(part);
            }
            let ta = HurwitzTable::new(q, 0.5 + alpha, &cfg.precision)?;
            let tb = HurwitzTable::new(q, 0.5 + beta, &cfg.precision)?;
            let (ga, gb) = (gamma_factor(q, alpha)?, gamma_factor(q, beta)?);
            let ea = rel * ta.magnitude() * ga.norm();
            let eb = rel * tb.magnitude() * gb.norm();
            for chi in &chars {
                let la = ga * ta.l_value(chi)?;
                let lb = gb * tb.l_value_conj(chi)?;
                let t = twist(chi);
                part.sum += w * la * lb * t;
                part.error += w * t.norm() * (la.norm() * eb + lb.norm() * ea + ea * eb);
            }
            part.count = chars.len() as u64;
            Ok(part)
        })
        .collect();
    let parts = parts?;

    let zero = Complex64::new(0.0, 0.0);
    let (mut raw, mut raw_err, mut cop, mut cop_err, mut count) = (zero, 0.0, zero, 0.0, 0);
    for p in &parts {
        raw += p.sum;
        raw_err += p.error;
        if gcd(p.q, coprime_to) == 1 {
            cop += p.sum;
            cop_err += p.error;
        }
        count += p.count;
    }
    Ok(BruteForce {
        raw: Estimate {
            value: raw,
            error: raw_err,
        },
        coprime: Estimate {
            value: cop,
            error: cop_err,
        },
        character_count: count,
        moduli: moduli.len() as u64,
    })
}

/// `Δ_{α,β}(h, k; Q) = Σ_q W(q/Q) Σ^♭_χ Λ(½+α, χ) Λ(½+β, χ̄) χ(h) χ̄(k)`, summed
/// by enumerating the family with L-values from Hurwitz ζ.
pub fn delta_bruteforce(spec: &FamilySpec, cfg: &MomentConfig) -> Result<BruteForce> {
    let (h, k) = (spec.twist_h.value(), spec.twist_k.value());
    family_sum(spec, cfg, spec.hk()?.value(), |chi| chi.value(h) * chi.value(k).conj())
}

/// Bilinear form `Σ_{h,k} λ_h λ̄_k/√(hk) (Δ(h, k) - main(h, k))` with the
/// executed main term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub brute: Estimate,
    pub main: Estimate,
    #[serde(with = "crate::serde_complex")]
    pub residual: Complex64,
    pub character_count: u64,
    pub cells: u64,
}

/// The twist of `spec` is ignored; every `(h, k)` pair of `lambda` is a cell.
/// The brute-force side needs one family pass: the cell sum collapses to
/// `|Σ_h λ_h χ(h)/√h|²` per character.
pub fn weighted_sweep(spec: &FamilySpec, lambda: &CoefficientVector, cfg: &MomentConfig) -> Result<SweepReport> {
    if lambda.is_empty() {
        return Err(Error::Invalid("coefficient vector is empty".into()));
    }
    let coeffs: Vec<(u64, Complex64)> = lambda
        .entries()
        .iter()
        .map(|c| (c.h, c.value / (c.h as f64).sqrt()))
        .collect();
    let brute = family_sum(spec, cfg, 1, |chi| {
        let a: Complex64 = coeffs.iter().map(|&(h, l)| l * chi.value(h)).sum();
        a * a.conj()
    })?;

    let mut main = Complex64::new(0.0, 0.0);
    let mut main_err = 0.0;
    for &(h, lh) in &coeffs {
        for &(k, lk) in &coeffs {
            let cell = main_term_executed(&spec.with_twist(h, k)?, cfg)?;
            let w = lh * lk.conj();
            main += w * cell.value;
            main_err += w.norm() * cell.error;
        }
    }
    let n = coeffs.len() as u64;
    Ok(SweepReport {
        brute: brute.raw,
        main: Estimate {
            value: main,
            error: main_err,
        },
        residual: brute.raw.value - main,
        character_count: brute.character_count,
        cells: n * n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunction::ShiftPair;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> MomentConfig {
        MomentConfig::default()
    }

    #[test]
    fn empty_family() {
        let spec = FamilySpec::new(2.0, ShiftPair::real(0.02, 0.01).unwrap(), 1, 1).unwrap();
        let b = delta_bruteforce(&spec, &cfg()).unwrap();
        assert_eq!(b.raw.value, c(0.0, 0.0));
        assert_eq!(b.character_count, 0);
    }

    #[test]
    fn swap_symmetry() {
        let s = ShiftPair::real(0.05, 0.02).unwrap();
        for (h, k) in [(1, 1), (2, 1), (3, 2)] {
            let a = delta_bruteforce(&FamilySpec::new(30.0, s, h, k).unwrap(), &cfg()).unwrap();
            let b = delta_bruteforce(&FamilySpec::new(30.0, s.swapped(), k, h).unwrap(), &cfg()).unwrap();
            assert!(a.raw.agrees_with(&b.raw, 0.0), "({h}, {k}): {:?} vs {:?}", a.raw, b.raw);
            assert!(a.raw.error < 1e-6 * a.raw.value.norm());
        }
    }

    #[test]
    fn conjugate_shifts_give_nonnegative_sums() {
        let s = ShiftPair::new(c(0.05, 0.03), c(0.05, -0.03)).unwrap();
        for h in [1, 2, 5] {
            let b = delta_bruteforce(&FamilySpec::new(25.0, s, h, h).unwrap(), &cfg()).unwrap();
            assert!(b.raw.value.re >= 0.0);
            assert!(b.raw.value.im.abs() <= 1e-10 * b.raw.value.re);
        }
    }

    #[test]
    fn budget_guard() {
        let spec = FamilySpec::new(30.0, ShiftPair::real(0.05, 0.02).unwrap(), 1, 1).unwrap();
        let small = MomentConfig { budget: 10, ..cfg() };
        assert!(matches!(
            delta_bruteforce(&spec, &small),
            Err(Error::Budget { limit: 10, .. })
        ));
    }

    #[test]
    fn coprime_part_equals_raw_sum() {
        // χ(h) χ̄(k) vanishes when (q, hk) > 1, so the filter removes only zeros
        let s = ShiftPair::real(0.05, 0.02).unwrap();
        for (h, k) in [(2, 1), (6, 5)] {
            let b = delta_bruteforce(&FamilySpec::new(20.0, s, h, k).unwrap(), &cfg()).unwrap();
            assert_eq!(b.coprime, b.raw);
        }
        let twisted_even = family_sum(&FamilySpec::new(20.0, s, 2, 1).unwrap(), &cfg(), 1, |chi| {
            if chi.modulus() % 2 == 0 {
                chi.value(2)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        assert_eq!(twisted_even.raw.value, c(0.0, 0.0));
    }

    #[test]
    fn sweep_with_single_coefficient_is_one_cell() {
        let spec = FamilySpec::new(20.0, ShiftPair::real(0.05, 0.02).unwrap(), 1, 1).unwrap();
        let lambda = CoefficientVector::new([(1, c(1.0, 0.0))], 1).unwrap();
        let sweep = weighted_sweep(&spec, &lambda, &cfg()).unwrap();
        let single = delta_bruteforce(&spec, &cfg()).unwrap();
        let main = main_term_executed(&spec, &cfg()).unwrap();
        assert!((sweep.brute.value - single.raw.value).norm() < 1e-12 * single.raw.value.norm());
        assert!((sweep.main.value - main.value).norm() < 1e-12 * main.value.norm());
    }

    #[test]
    fn sweep_is_real_for_real_coefficients_and_conjugate_shifts() {
        let spec = FamilySpec::new(20.0, ShiftPair::new(c(0.05, 0.03), c(0.05, -0.03)).unwrap(), 1, 1).unwrap();
        let lambda = CoefficientVector::new([(1, c(1.0, 0.0)), (2, c(-1.0, 0.0)), (3, c(-1.0, 0.0))], 4).unwrap();
        let sweep = weighted_sweep(&spec, &lambda, &cfg()).unwrap();
        assert!(sweep.brute.value.im.abs() < 1e-10 * sweep.brute.value.norm());
        assert!(sweep.main.value.im.abs() < 1e-10 * sweep.main.value.norm());
        assert!(sweep.residual.re.is_finite());
        assert_eq!(sweep.cells, 9);
    }
}
