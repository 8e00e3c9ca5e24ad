//! Dirichlet L-values through the Hurwitz decomposition
//! `L(s, χ) = q^{-s} Σ_{a=1}^{q} χ(a) ζ(s, a/q)`, and the completed function
//! `Λ(½ + s, χ) = (q/π)^{s/2} Γ(¼ + s/2) L(½ + s, χ)` for even primitive χ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::characters::{root_number, DirichletCharacter};
use crate::error::{Error, Result};
use crate::special::{hurwitz_constant_term, hurwitz_zeta_with, log_gamma, PrecisionProfile};

pub const DEFAULT_SHIFT_BOUND: f64 = 0.5;

/// The shift pair (α, β): both nonzero, α ≠ ±β, and bounded in modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawShifts", into = "RawShifts")]
pub struct ShiftPair {
    alpha: Complex64,
    beta: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RawShifts {
    #[serde(with = "crate::serde_complex")]
    alpha: Complex64,
    #[serde(with = "crate::serde_complex")]
    beta: Complex64,
}

impl TryFrom<RawShifts> for ShiftPair {
    type Error = Error;
    fn try_from(r: RawShifts) -> Result<Self> {
        ShiftPair::new(r.alpha, r.beta)
    }
}

impl From<ShiftPair> for RawShifts {
    fn from(s: ShiftPair) -> Self {
        RawShifts {
            alpha: s.alpha,
            beta: s.beta,
        }
    }
}

impl ShiftPair {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::with_bound(alpha, beta, DEFAULT_SHIFT_BOUND)
    }

    pub fn with_bound(alpha: Complex64, beta: Complex64, bound: f64) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidShift(format!("{msg} (alpha = {alpha}, beta = {beta})")));
        if !(alpha.re.is_finite() && alpha.im.is_finite() && beta.re.is_finite() && beta.im.is_finite()) {
            return bad("shifts must be finite");
        }
        if alpha == Complex64::new(0.0, 0.0) || beta == Complex64::new(0.0, 0.0) {
            return bad("shifts must be nonzero");
        }
        if alpha == beta {
            return bad("alpha must differ from beta");
        }
        if alpha == -beta {
            return bad("alpha + beta must be nonzero");
        }
        if alpha.norm() > bound || beta.norm() > bound {
            return bad(&format!("shifts must have modulus at most {bound}"));
        }
        Ok(Self { alpha, beta })
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    /// The default comparison shifts `(0.9/log Q, 0.4/log Q)`.
    pub fn auto(q_scale: f64) -> Result<Self> {
        if !(q_scale > 1.0) {
            return Err(Error::InvalidShift(format!("auto shifts need Q > 1, got {q_scale}")));
        }
        let l = q_scale.ln();
        Self::real(0.9 / l, 0.4 / l)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn sum(&self) -> Complex64 {
        self.alpha + self.beta
    }

    /// `(β, α)`.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }

    /// `(-β, -α)`, the partner pair in the functional equation.
    pub fn reflected(&self) -> Self {
        Self {
            alpha: -self.beta,
            beta: -self.alpha,
        }
    }

    /// `(ᾱ, β̄)`.
    pub fn conj(&self) -> Self {
        Self {
            alpha: self.alpha.conj(),
            beta: self.beta.conj(),
        }
    }
}

/// `ζ(s, a/q)` for the residues `1 <= a <= q` coprime to `q` (zero elsewhere).
/// One table serves every character mod `q` at this `s`.
#[derive(Debug, Clone)]
pub struct HurwitzTable {
    q: u64,
    s: Complex64,
    /// Constant terms at s = 1 instead of values; the pole cancels for nontrivial χ.
    at_pole: bool,
    values: Vec<Complex64>,
}

impl HurwitzTable {
    pub fn new(q: u64, s: Complex64, prof: &PrecisionProfile) -> Result<Self> {
        if q == 0 {
            return Err(Error::Invalid("modulus must be positive".into()));
        }
        let at_pole = s == Complex64::new(1.0, 0.0);
        let mut values = vec![Complex64::new(0.0, 0.0); q as usize + 1];
        for a in 1..=q {
            if gcd(a, q) != 1 {
                continue;
            }
            let x = a as f64 / q as f64;
            values[a as usize] = if at_pole {
                Complex64::new(hurwitz_constant_term(x, prof)?, 0.0)
            } else {
                hurwitz_zeta_with(s, x, prof)?
            };
        }
        Ok(Self { q, s, at_pole, values })
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `L(s, χ)` for a character mod `q`.
    pub fn l_value(&self, chi: &DirichletCharacter) -> Result<Complex64> {
        if chi.modulus() != self.q {
            return Err(Error::Invalid(format!(
                "table is mod {}, character mod {}",
                self.q,
                chi.modulus()
            )));
        }
        if self.at_pole && chi.is_trivial() {
            return Err(Error::Pole("L(s, χ) at s = 1 for principal χ".into()));
        }
        let vals = chi.values();
        let mut sum = Complex64::new(0.0, 0.0);
        for a in 1..=self.q as usize {
            let z = self.values[a];
            if z != Complex64::new(0.0, 0.0) {
                sum += vals[a % self.q as usize] * z;
            }
        }
        let q = self.q as f64;
        Ok(if self.at_pole {
            // Σ χ(a) = 0 removes the 1/(s-1) part; what is left is -Σχ(a)ψ(a/q)/q
            sum / q
        } else {
            (-self.s * q.ln()).exp() * sum
        })
    }

    /// `|q^{-s}| Σ_a |ζ(s, a/q)|`, the scale of rounding error in `l_value`.
    pub fn magnitude(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|z| z.norm()).sum();
        if self.at_pole {
            sum / self.q as f64
        } else {
            sum * (self.q as f64).powf(-self.s.re)
        }
    }

    /// `L(s, χ̄)` without building the conjugate character.
    pub fn l_value_conj(&self, chi: &DirichletCharacter) -> Result<Complex64> {
        self.l_value(&chi.conj())
    }
}

/// `L(s, χ)`.
pub fn l_value(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    l_value_with(s, chi, &PrecisionProfile::default())
}

pub fn l_value_with(s: Complex64, chi: &DirichletCharacter, prof: &PrecisionProfile) -> Result<Complex64> {
    HurwitzTable::new(chi.modulus(), s, prof)?.l_value(chi)
}

/// `(q/π)^{s/2} Γ(¼ + s/2)`.
pub fn gamma_factor(q: u64, s: Complex64) -> Result<Complex64> {
    let lg = log_gamma(0.25 + s / 2.0)?;
    Ok((s / 2.0 * (q as f64 / PI).ln() + lg).exp())
}

fn require_even_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_even() || !chi.is_primitive() {
        return Err(Error::Domain(format!(
            "completed L-function needs an even primitive character, got {chi:?}"
        )));
    }
    Ok(())
}

/// `Λ(½ + s, χ)`; the argument is the shift from the central point.
pub fn completed_lambda(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    completed_lambda_with(s, chi, &PrecisionProfile::default())
}

pub fn completed_lambda_with(s: Complex64, chi: &DirichletCharacter, prof: &PrecisionProfile) -> Result<Complex64> {
    require_even_primitive(chi)?;
    Ok(gamma_factor(chi.modulus(), s)? * l_value_with(0.5 + s, chi, prof)?)
}

/// `Λ(½ + s, χ)` with a table already built at `½ + s`.
pub fn completed_lambda_from(table: &HurwitzTable, chi: &DirichletCharacter, conj: bool) -> Result<Complex64> {
    require_even_primitive(chi)?;
    let l = if conj {
        table.l_value_conj(chi)?
    } else {
        table.l_value(chi)?
    };
    Ok(gamma_factor(table.q(), table.s() - 0.5)? * l)
}

/// `|Λ(½ + s, χ) - ε(χ) Λ(½ - s, χ̄)|`.
pub fn functional_equation_residual(s: Complex64, chi: &DirichletCharacter) -> Result<f64> {
    let eps = root_number(chi)?;
    let lhs = completed_lambda(s, chi)?;
    let rhs = eps * completed_lambda(-s, &chi.conj())?;
    Ok((lhs - rhs).norm())
}
