use std::f64::consts::PI;

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::lfunction::{completed_lambda_with, ShiftPair};
use crate::special::PrecisionProfile;
use crate::transforms::{ContourSpec, VKernel};

/// Terms with `|V(πmn/q)|` below this are dropped from `S(α, β; χ)`.
pub const DEFAULT_V_TOL: f64 = 1e-10;

/// `S(α, β; χ) = (q/π)^{(α+β)/2} Σ_{m,n} χ(m) χ̄(n) m^{-½-α} n^{-½-β} V_{α,β}(πmn/q)`,
/// with the `m, n` range cut where `V` has decayed below the tolerance.
#[derive(Debug, Clone)]
pub struct SSumPlan {
    shifts: ShiftPair,
    kernel: VKernel,
    x_cut: f64,
}

impl SSumPlan {
    pub fn new(shifts: &ShiftPair, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Invalid(format!("V tolerance must be positive, got {tol}")));
        }
        let kernel = VKernel::new(shifts, ContourSpec::default().step)?;
        let x_cut = kernel.decay_cutoff(tol)?;
        Ok(Self {
            shifts: *shifts,
            kernel,
            x_cut,
        })
    }

    pub fn x_cut(&self) -> f64 {
        self.x_cut
    }

    /// Largest `mn` kept for modulus `q`.
    pub fn n_max(&self, q: u64) -> usize {
        (self.x_cut * q as f64 / PI).floor() as usize
    }

    /// `V(πN/q)` for `N = 0..=n_max(q)` (index 0 unused); shared by every χ mod `q`.
    pub fn v_table(&self, q: u64) -> Result<Vec<Complex64>> {
        let n_max = self.n_max(q);
        let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for (n, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = self.kernel.eval(PI * n as f64 / q as f64)?;
        }
        Ok(out)
    }

    pub fn eval(&self, chi: &DirichletCharacter) -> Result<Complex64> {
        self.eval_with(chi, &self.v_table(chi.modulus())?)
    }

    /// Same as `eval` with a table from `v_table(chi.modulus())`.
    pub fn eval_with(&self, chi: &DirichletCharacter, v: &[Complex64]) -> Result<Complex64> {
        let q = chi.modulus();
        let n_max = self.n_max(q);
        if v.len() != n_max + 1 {
            return Err(Error::Invalid(format!(
                "V table has {} entries, expected {}",
                v.len(),
                n_max + 1
            )));
        }
        let (a, b) = (self.shifts.alpha(), self.shifts.beta());
        let vals = chi.values();
        let coeffs = |shift: Complex64, conj: bool| -> Vec<Complex64> {
            (0..=n_max)
                .map(|n| {
                    if n == 0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let x = vals[n % q as usize];
                    if x == Complex64::new(0.0, 0.0) {
                        return x;
                    }
                    let x = if conj { x.conj() } else { x };
                    x * (-(0.5 + shift) * (n as f64).ln()).exp()
                })
                .collect()
        };
        let cm = coeffs(a, false);
        let cn = coeffs(b, true);
        let mut total = Complex64::new(0.0, 0.0);
        for m in 1..=n_max {
            if cm[m] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for n in 1..=n_max / m {
                row += cn[n] * v[m * n];
            }
            total += cm[m] * row;
        }
        let pref = (self.shifts.sum() / 2.0 * (q as f64 / PI).ln()).exp();
        Ok(pref * total)
    }
}

/// `S(α, β; χ)` for an even primitive χ.
pub fn s_sum(shifts: &ShiftPair, chi: &DirichletCharacter, tol: f64) -> Result<Complex64> {
    require_even_primitive(chi)?;
    SSumPlan::new(shifts, tol)?.eval(chi)
}

fn require_even_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_even() || !chi.is_primitive() {
        return Err(Error::Domain("S(α, β; χ) needs an even primitive character".into()));
    }
    Ok(())
}

/// Both halves `S(α, β; χ)` and `S(-β, -α; χ)` of the approximate functional equation.
#[derive(Debug, Clone)]
pub struct AfePlan {
    shifts: ShiftPair,
    direct: SSumPlan,
    mirror: SSumPlan,
    precision: PrecisionProfile,
}

impl AfePlan {
    pub fn new(shifts: &ShiftPair, tol: f64, precision: PrecisionProfile) -> Result<Self> {
        Ok(Self {
            shifts: *shifts,
            direct: SSumPlan::new(shifts, tol)?,
            mirror: SSumPlan::new(&shifts.reflected(), tol)?,
            precision,
        })
    }

    /// V tables for modulus `q`, to reuse across the characters mod `q`.
    pub fn tables(&self, q: u64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        Ok((self.direct.v_table(q)?, self.mirror.v_table(q)?))
    }

    /// `S(α, β; χ) + S(-β, -α; χ)`.
    pub fn sum_with(&self, chi: &DirichletCharacter, tables: &(Vec<Complex64>, Vec<Complex64>)) -> Result<Complex64> {
        require_even_primitive(chi)?;
        Ok(self.direct.eval_with(chi, &tables.0)? + self.mirror.eval_with(chi, &tables.1)?)
    }

    /// `Λ(½ + α, χ) Λ(½ + β, χ̄)` through Hurwitz ζ.
    pub fn lambda_product(&self, chi: &DirichletCharacter) -> Result<Complex64> {
        let a = completed_lambda_with(self.shifts.alpha(), chi, &self.precision)?;
        let b = completed_lambda_with(self.shifts.beta(), &chi.conj(), &self.precision)?;
        Ok(a * b)
    }

    pub fn residual_with(&self, chi: &DirichletCharacter, tables: &(Vec<Complex64>, Vec<Complex64>)) -> Result<f64> {
        Ok((self.sum_with(chi, tables)? - self.lambda_product(chi)?).norm())
    }

    pub fn residual(&self, chi: &DirichletCharacter) -> Result<f64> {
        self.residual_with(chi, &self.tables(chi.modulus())?)
    }
}

/// `|S(α, β; χ) + S(-β, -α; χ) - Λ(½ + α, χ) Λ(½ + β, χ̄)|`.
pub fn afe_residual(shifts: &ShiftPair, chi: &DirichletCharacter) -> Result<f64> {
    AfePlan::new(shifts, DEFAULT_V_TOL, PrecisionProfile::default())?.residual(chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FactoredInt;
    use crate::characters::{build_group, enumerate_characters};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn even_primitive(q: u64) -> Vec<DirichletCharacter> {
        let g = build_group(&FactoredInt::new(q).unwrap()).unwrap();
        enumerate_characters(&g, true, true)
    }

    #[test]
    fn quadratic_character_mod_5() {
        let chi = &even_primitive(5)[0];
        assert!(chi.is_real());
        let s = ShiftPair::real(0.02, 0.01).unwrap();
        assert!(afe_residual(&s, chi).unwrap() <= 1e-7);
    }

    #[test]
    fn truncation_tail_is_small() {
        let plan = SSumPlan::new(&ShiftPair::real(0.02, 0.01).unwrap(), DEFAULT_V_TOL).unwrap();
        assert!(plan.x_cut() < 60.0);
        assert!(plan.kernel.eval(60.0).unwrap().norm() < 1e-10);
    }

    #[test]
    fn conjugation() {
        let s = ShiftPair::new(c(0.1, 0.05), c(0.03, -0.02)).unwrap();
        for chi in even_primitive(13) {
            let a = s_sum(&s.conj(), &chi.conj(), DEFAULT_V_TOL).unwrap();
            let b = s_sum(&s, &chi, DEFAULT_V_TOL).unwrap().conj();
            assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn afe_on_small_moduli() {
        for shifts in [
            ShiftPair::real(0.02, 0.01).unwrap(),
            ShiftPair::new(c(0.1, 0.05), c(0.03, 0.0)).unwrap(),
        ] {
            let plan = AfePlan::new(&shifts, DEFAULT_V_TOL, PrecisionProfile::default()).unwrap();
            for q in [5, 8, 12, 13, 21, 40] {
                let tables = plan.tables(q).unwrap();
                for chi in even_primitive(q) {
                    let r = plan.residual_with(&chi, &tables).unwrap();
                    assert!(r <= 1e-7, "q = {q}, {chi:?}: {r:e}");
                }
            }
        }
    }

    #[test]
    fn rejects_odd_characters() {
        let g = build_group(&FactoredInt::new(7).unwrap()).unwrap();
        let odd = enumerate_characters(&g, false, true)
            .into_iter()
            .find(|c| !c.is_even())
            .unwrap();
        assert!(s_sum(&ShiftPair::real(0.02, 0.01).unwrap(), &odd, DEFAULT_V_TOL).is_err());
    }
}
