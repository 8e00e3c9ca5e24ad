use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FamilySpec, MomentConfig};
use crate::arith::{euler_p, gcd, phi_cap, zeta_q_with, Estimate, FactoredInt};
use crate::characters::even_primitive_count;
use crate::error::{Error, Result};
use crate::lfunction::ShiftPair;
use crate::special::{log_gamma, riemann_zeta};
use crate::transforms::{line_integral_over_s, mellin_w, v_tilde, weight_w, ContourSpec, ENVELOPE_TOL};

fn cpow(x: f64, s: Complex64) -> Complex64 {
    (s * x.ln()).exp()
}

/// The two `(h, k)` factors of the main term:
/// `Γ(¼+α/2)Γ(¼+β/2) (h,k)^{1+α+β} / (h^{½+β} k^{½+α})` and its `(−β, −α)` mirror.
fn twist_factors(shifts: &ShiftPair, h: u64, k: u64) -> Result<(Complex64, Complex64)> {
    let piece = |a: Complex64, b: Complex64| -> Result<Complex64> {
        let g = gcd(h, k) as f64;
        let gam = (log_gamma(0.25 + a / 2.0)? + log_gamma(0.25 + b / 2.0)?).exp();
        Ok(gam * cpow(g, 1.0 + a + b) / (cpow(h as f64, 0.5 + b) * cpow(k as f64, 0.5 + a)))
    };
    let (a, b) = (shifts.alpha(), shifts.beta());
    Ok((piece(a, b)?, piece(-b, -a)?))
}

/// Contribution of one modulus `q` to the main term, before the `(q, hk) = 1` filter.
fn theorem1_term(spec: &FamilySpec, cfg: &MomentConfig, q: u64) -> Result<Complex64> {
    let s = &spec.shifts;
    let (plus, minus) = twist_factors(s, spec.twist_h.value(), spec.twist_k.value())?;
    let w = weight_w(q as f64 / spec.scale_q, &spec.weight);
    let fq = FactoredInt::new(q)?;
    let count = even_primitive_count(&fq);
    if w == 0.0 || count == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sum = s.sum();
    let x = cpow(q as f64 / PI, sum / 2.0);
    let first = x * plus * zeta_q_with(&fq, 1.0 + sum, &cfg.precision)?;
    let second = minus / x * zeta_q_with(&fq, 1.0 - sum, &cfg.precision)?;
    Ok(w * count as f64 * (first + second))
}

fn theorem1_sum(spec: &FamilySpec, cfg: &MomentConfig, coprime_only: bool) -> Result<Complex64> {
    spec.validate()?;
    let hk = spec.hk()?.value();
    let mut total = Complex64::new(0.0, 0.0);
    for q in spec.moduli() {
        if coprime_only && gcd(q, hk) != 1 {
            continue;
        }
        total += theorem1_term(spec, cfg, q)?;
    }
    Ok(total)
}

/// The main term of the moment summed over `q ∈ (Q, 2Q)` coprime to `hk`,
/// with the exact even primitive count for each `q`.
pub fn main_term_theorem1(spec: &FamilySpec, cfg: &MomentConfig) -> Result<Complex64> {
    theorem1_sum(spec, cfg, true)
}

/// The closed form with the `q`-sum executed:
/// `Q²/2 Φ(hk, 1) [W̃_{α,β}(1) (Q/π)^{(α+β)/2} Γ Γ (h,k)^{1+α+β}/(h^{½+β}k^{½+α}) ζ(1+α+β) P(hk; 1, 1+α+β) + mirror]`.
pub fn main_term_executed(spec: &FamilySpec, cfg: &MomentConfig) -> Result<Estimate> {
    spec.validate()?;
    let s = &spec.shifts;
    let (h, k) = (spec.twist_h.value(), spec.twist_k.value());
    let hk = spec.hk()?;
    let (plus, minus) = twist_factors(s, h, k)?;
    let sum = s.sum();
    let one = Complex64::new(1.0, 0.0);
    let q = spec.scale_q;
    let x = cpow(q / PI, sum / 2.0);

    let p_plus = euler_p(&hk, one, 1.0 + sum, &cfg.euler)?;
    let p_minus = euler_p(&hk, one, 1.0 - sum, &cfg.euler)?;
    let first = mellin_w(one, s, &spec.weight)? * x * plus * riemann_zeta(1.0 + sum, &cfg.precision)?;
    let second = mellin_w(one, &s.reflected(), &spec.weight)? / x * minus * riemann_zeta(1.0 - sum, &cfg.precision)?;
    let scale = q * q / 2.0 * phi_cap(&hk, one);
    Ok(Estimate {
        value: scale * (first * p_plus.value + second * p_minus.value),
        error: scale.norm() * (first.norm() * p_plus.error + second.norm() * p_minus.error),
    })
}

struct Diagonal {
    prefactor: Complex64,
    x: f64,
    hk: FactoredInt,
}

impl Diagonal {
    fn new(spec: &FamilySpec) -> Result<Self> {
        spec.validate()?;
        let (h, k) = (spec.twist_h.value(), spec.twist_k.value());
        let g = gcd(h, k);
        let (hh, kk) = ((h / g) as f64, (k / g) as f64);
        let s = &spec.shifts;
        let hk = spec.hk()?;
        let q = spec.scale_q;
        let prefactor = cpow(q / PI, s.sum() / 2.0) * q * q * phi_cap(&hk, Complex64::new(1.0, 0.0))
            / (2.0 * cpow(hh, 0.5 + s.beta()) * cpow(kk, 0.5 + s.alpha()));
        Ok(Self {
            prefactor,
            x: q / (PI * hh * kk),
            hk,
        })
    }

    /// `Ṽ(s) W̃(1+s) X^s ζ(1+2s+α+β)`, without the Euler product.
    fn analytic_part(&self, spec: &FamilySpec, cfg: &MomentConfig, s: Complex64) -> Result<Complex64> {
        let sh = &spec.shifts;
        Ok(v_tilde(s, sh)?
            * mellin_w(1.0 + s, sh, &spec.weight)?
            * cpow(self.x, s)
            * riemann_zeta(1.0 + 2.0 * s + sh.sum(), &cfg.precision)?)
    }

    fn integrand(&self, spec: &FamilySpec, cfg: &MomentConfig, s: Complex64) -> Result<Complex64> {
        let p = euler_p(
            &self.hk,
            Complex64::new(1.0, 0.0),
            1.0 + 2.0 * s + spec.shifts.sum(),
            &cfg.euler,
        )?;
        Ok(self.analytic_part(spec, cfg, s)? * p.value)
    }

    /// Line `Re(s) = c`: spacing from the distance to the nearest singularity,
    /// height from the decay of the integrand.
    fn contour(
        &self,
        spec: &FamilySpec,
        cfg: &MomentConfig,
        c: f64,
        base: &ContourSpec,
        f0: Complex64,
    ) -> Result<ContourSpec> {
        let sh = &spec.shifts;
        let gamma_pole = -0.5 - sh.alpha().re.min(sh.beta().re);
        let p_edge = -0.5 - sh.sum().re / 2.0;
        let d = c - gamma_pole.max(p_edge);
        if d <= 0.0 {
            return Err(Error::Domain(format!(
                "diagonal line Re(s) = {c} crosses a singularity"
            )));
        }
        let step = base.step.min(d / 6.0);
        let seed = ContourSpec {
            real_part: c,
            im_cutoff: step,
            step,
        };
        let tol = ENVELOPE_TOL * f0.norm().max(1.0);
        let envelope = |s: Complex64| {
            self.analytic_part(spec, cfg, s)
                .map(|v| (v / s).norm())
                .unwrap_or(f64::INFINITY)
        };
        let fitted = seed.fit_cutoff(envelope, tol, 400.0)?;
        let n = (fitted.im_cutoff.max(base.im_cutoff) / step).ceil();
        ContourSpec::new(c, n * step, step)
    }

    fn integral(&self, spec: &FamilySpec, cfg: &MomentConfig, c: f64, base: &ContourSpec) -> Result<Complex64> {
        let f0 = self.integrand(spec, cfg, Complex64::new(0.0, 0.0))?;
        let contour = self.contour(spec, cfg, c, base, f0)?;
        let f = |s: Complex64| self.integrand(spec, cfg, s);
        Ok(self.prefactor * line_integral_over_s(f, f0, &contour)?)
    }
}

/// The diagonal contribution
/// `(Q/π)^{(α+β)/2} Q² Φ(hk,1) / (2 H^{½+β} K^{½+α}) (1/2πi)∫_{(ε)} Ṽ(s) W̃(1+s) (Q/(πHK))^s ζ(1+2s+α+β) P(hk; 1, 1+2s+α+β) ds/s`
/// with `H = h/(h,k)`, `K = k/(h,k)` and `ε = cfg.diagonal_contour.real_part`.
pub fn diagonal_term(spec: &FamilySpec, cfg: &MomentConfig) -> Result<Complex64> {
    let base = cfg.diagonal_contour;
    base.validate()?;
    let eps = base.real_part;
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::Domain(format!("diagonal line needs 0 < ε < 0.25, got {eps}")));
    }
    if (2.0 * eps + spec.shifts.sum().re) <= 0.0 {
        return Err(Error::Domain(format!(
            "Re(1 + 2ε + α + β) must exceed 1 on the diagonal line (ε = {eps}, α + β = {})",
            spec.shifts.sum()
        )));
    }
    Diagonal::new(spec)?.integral(spec, cfg, eps, &base)
}

/// Moving the diagonal line from `ε` to the left of `s = 0` must drop exactly
/// the residue at 0, assembled independently as
/// `(Q/π)^{(α+β)/2} (h,k)^{1+α+β} / (2 h^{½+β} k^{½+α}) Q² Φ(hk,1) Ṽ(0) W̃(1) ζ(1+α+β) P(hk; 1, 1+α+β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalResidueCheck {
    #[serde(with = "crate::serde_complex")]
    pub right: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub left: Complex64,
    pub left_line: f64,
    #[serde(with = "crate::serde_complex")]
    pub residue: Complex64,
    /// `|right - left - residue| / |residue|`
    pub relative_residual: f64,
}

pub fn diagonal_residue_check(spec: &FamilySpec, cfg: &MomentConfig) -> Result<DiagonalResidueCheck> {
    let right = diagonal_term(spec, cfg)?;
    let sh = &spec.shifts;
    // halfway to the nearer of the Gamma poles and the edge of P's domain, off the ζ pole
    let edge = (-0.5 - sh.alpha().re.min(sh.beta().re)).max(-0.5 - sh.sum().re / 2.0);
    let mut left_line = edge / 2.0;
    if (Complex64::new(left_line, 0.0) + sh.sum() / 2.0).norm() < 1e-3 {
        left_line = edge * 0.4;
    }
    let diag = Diagonal::new(spec)?;
    let left = diag.integral(spec, cfg, left_line, &cfg.diagonal_contour)?;

    let (h, k) = (spec.twist_h.value(), spec.twist_k.value());
    let one = Complex64::new(1.0, 0.0);
    let sum = sh.sum();
    let q = spec.scale_q;
    let hk = spec.hk()?;
    let residue = cpow(q / PI, sum / 2.0) * cpow(gcd(h, k) as f64, 1.0 + sum)
        / (2.0 * cpow(h as f64, 0.5 + sh.beta()) * cpow(k as f64, 0.5 + sh.alpha()))
        * q
        * q
        * phi_cap(&hk, one)
        * v_tilde(Complex64::new(0.0, 0.0), sh)?
        * mellin_w(one, sh, &spec.weight)?
        * riemann_zeta(1.0 + sum, &cfg.precision)?
        * euler_p(&hk, one, 1.0 + sum, &cfg.euler)?.value;
    Ok(DiagonalResidueCheck {
        right,
        left,
        left_line,
        residue,
        relative_residual: (right - left - residue).norm() / residue.norm(),
    })
}
