use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contour::ContourSpec;
use super::pairwise_sum;
use crate::error::{Error, Result};
use crate::special::{gamma_pole_distance, log_gamma};

/// Numerator Gamma arguments closer than this to a pole are rejected.
pub const POLE_GUARD: f64 = 1e-6;
const FORM_AGREEMENT: f64 = 1e-9;

fn ln_rgamma(z: Complex64) -> Option<Complex64> {
    // None marks a zero of 1/Γ
    log_gamma(z).ok().map(|l| -l)
}

fn guard(which: &'static str, z: Complex64) -> Result<()> {
    let distance = gamma_pole_distance(z);
    if distance < POLE_GUARD {
        return Err(Error::PoleProximity { which, distance });
    }
    Ok(())
}

/// Both closed forms of `H(w, z)`:
///
/// `2^z sin(πz/2) Γ(1-z) Γ(w/2) Γ((z-w)/2) / (Γ((1-w)/2) Γ((1-z+w)/2))` and
/// `√π Γ((1-z)/2) Γ(w/2) Γ((z-w)/2) / (Γ(z/2) Γ((1-w)/2) Γ((1-z+w)/2))`.
pub fn h_kernel_forms(w: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    let a = w / 2.0;
    let b = (z - w) / 2.0;
    guard("Gamma(w/2)", a)?;
    guard("Gamma((z-w)/2)", b)?;
    guard("Gamma(1-z)", 1.0 - z)?;
    guard("Gamma((1-z)/2)", (1.0 - z) / 2.0)?;
    let zero = Complex64::new(0.0, 0.0);
    let den = match (ln_rgamma((1.0 - w) / 2.0), ln_rgamma((1.0 - z + w) / 2.0)) {
        (Some(x), Some(y)) => x + y,
        _ => return Ok((zero, zero)),
    };
    let common = log_gamma(a)? + log_gamma(b)? + den;
    let first = (common + log_gamma(1.0 - z)? + z * 2f64.ln()).exp() * (z * PI / 2.0).sin();
    let second = match ln_rgamma(z / 2.0) {
        Some(r) => (common + log_gamma((1.0 - z) / 2.0)? + r).exp() * PI.sqrt(),
        None => zero,
    };
    Ok((first, second))
}

/// `H(w, z)`, checked against its second closed form.
pub fn h_kernel(w: Complex64, z: Complex64) -> Result<Complex64> {
    let (first, second) = h_kernel_forms(w, z)?;
    if (first - second).norm() > FORM_AGREEMENT * (1.0 + second.norm()) {
        return Err(Error::Domain(format!(
            "closed forms of H disagree at w = {w}, z = {z}: {first} vs {second}"
        )));
    }
    Ok(second)
}

/// Settings for the numerical check of
/// `(1/2δ)∫_{-δ}^{δ} (|1+e^ξ r|^{-z} + |1-e^ξ r|^{-z}) dξ
///   = (1/2πi)∫_{(c)} H(w, z) r^{-w} (e^{δw} - e^{-δw})/(2δw) dw`.
///
/// The right side converges only conditionally, so the integrand is damped by
/// a smooth window equal to 1 on `|Im w| <= T/2` and 0 from `T` on, where
/// `T = contour.im_cutoff`. `contour.real_part` is ignored; the line is given
/// per call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCheckConfig {
    pub delta: f64,
    pub contour: ContourSpec,
    pub xi_nodes: usize,
}

impl Default for KernelCheckConfig {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            contour: ContourSpec {
                real_part: 0.0,
                im_cutoff: 1600.0,
                step: 0.02,
            },
            xi_nodes: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCheck {
    /// `|1+r|^{-z} + |1-r|^{-z}`
    #[serde(with = "crate::serde_complex")]
    pub lhs: Complex64,
    /// The ξ-average of the left side over `[-δ, δ]`.
    #[serde(with = "crate::serde_complex")]
    pub lhs_smoothed: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub rhs: Complex64,
    /// `|rhs - lhs_smoothed|`
    pub residual: f64,
    /// `|lhs_smoothed - lhs|`, of order `δ²`.
    pub smoothing_bias: f64,
}

/// Gevrey-class cutoff: 1 on `|u| <= 1/2`, 0 on `|u| >= 1`.
fn window(u: f64) -> f64 {
    let u = u.abs();
    if u <= 0.5 {
        return 1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    let y = 2.0 * (1.0 - u);
    let a = (-1.0 / y).exp();
    let b = (-1.0 / (1.0 - y)).exp();
    a / (a + b)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn kernel_lhs(r: f64, z: Complex64) -> Complex64 {
    let p = |x: f64| (-z * x.abs().ln()).exp();
    p(1.0 + r) + p(1.0 - r)
}

pub fn kernel_identity_check(r: f64, z: Complex64, c: f64, cfg: &KernelCheckConfig) -> Result<KernelCheck> {
    if !(r > 0.0) || !r.is_finite() || r == 1.0 {
        return Err(Error::Domain(format!("kernel check needs r > 0, r != 1, got {r}")));
    }
    if !(z.re > 0.0 && z.re < 1.0) {
        return Err(Error::Domain(format!("kernel check needs 0 < Re z < 1, got {z}")));
    }
    if !(c > 0.0 && c < z.re) {
        return Err(Error::Domain(format!("kernel check needs 0 < c < Re z, got c = {c}")));
    }
    let delta = cfg.delta;
    if !(delta > 0.0) || delta * (1.0 + r) >= (1.0 - r).abs() {
        return Err(Error::Invalid(format!("delta {delta} too large for r = {r}")));
    }
    cfg.contour.validate()?;
    if cfg.xi_nodes < 2 {
        return Err(Error::Invalid("xi_nodes must be at least 2".into()));
    }

    let lhs = kernel_lhs(r, z);
    let lhs_smoothed = gauss_legendre(cfg.xi_nodes)
        .into_iter()
        .map(|(x, w)| w / 2.0 * kernel_lhs(r * (delta * x).exp(), z))
        .sum::<Complex64>();

    let big_t = cfg.contour.im_cutoff;
    let nodes: Vec<(f64, f64)> = cfg.contour.nodes().collect();
    let ln_r = r.ln();
    let terms: Result<Vec<Complex64>> = nodes
        .par_iter()
        .map(|&(t, wt)| {
            let psi = window(t / big_t);
            if psi == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let w = Complex64::new(c, t);
            let dw = delta * w;
            Ok(wt * psi * h_kernel(w, z)? * (-w * ln_r).exp() * dw.sinh() / dw)
        })
        .collect();
    let rhs = pairwise_sum(&terms?) / (2.0 * PI);

    Ok(KernelCheck {
        lhs,
        lhs_smoothed,
        rhs,
        residual: (rhs - lhs_smoothed).norm(),
        smoothing_bias: (lhs_smoothed - lhs).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn forms_agree() {
        let (a, b) = h_kernel_forms(c(0.3, 0.0), c(0.8, 0.0)).unwrap();
        assert!((a - b).norm() < 1e-12 * b.norm());
        for (w, z) in [
            (c(0.2, 5.0), c(0.5, 2.0)),
            (c(0.1, -30.0), c(0.9, 0.0)),
            (c(0.4, 0.0), c(0.6, -1.0)),
        ] {
            let (a, b) = h_kernel_forms(w, z).unwrap();
            assert!((a - b).norm() < 1e-11 * (1.0 + b.norm()), "{w}, {z}");
        }
    }

    #[test]
    fn pole_proximity_is_reported() {
        let err = h_kernel(c(1e-8, 0.0), c(0.5, 0.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::PoleProximity {
                which: "Gamma(w/2)",
                ..
            }
        ));
        let err = h_kernel(c(0.5, 0.0), c(0.5 + 1e-8, 0.0)).unwrap_err();
        assert!(matches!(err, Error::PoleProximity { .. }));
    }

    #[test]
    fn polynomial_decay_on_vertical_lines() {
        // |H(c + it, z)| ~ C |t|^{Re z - 1}
        let z = c(0.5, 0.0);
        let ratio = |t: f64| h_kernel(c(0.25, t), z).unwrap().norm() * t.powf(1.0 - z.re);
        let (a, b, d) = (ratio(10.0), ratio(20.0), ratio(40.0));
        assert!((a / d - 1.0).abs() < 0.05 && (b / d - 1.0).abs() < 0.02, "{a} {b} {d}");
    }

    #[test]
    fn window_shape() {
        assert_eq!(window(0.3), 1.0);
        assert_eq!(window(-1.2), 0.0);
        assert!((window(0.75) - 0.5).abs() < 1e-15);
        assert!(window(0.9) < window(0.6));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let q = gauss_legendre(20);
        let int = |k: i32| q.iter().map(|&(x, w)| w * x.powi(k)).sum::<f64>();
        assert!((int(0) - 2.0).abs() < 1e-14);
        assert!((int(38) - 2.0 / 39.0).abs() < 1e-14);
        assert!(int(7).abs() < 1e-15);
    }

    #[test]
    fn kernel_identity_grid() {
        let cfg = KernelCheckConfig::default();
        for r in [0.1, 0.5, 2.0, 10.0] {
            for z in [c(0.3, 0.0), c(0.5, 2.0), c(0.9, 0.0)] {
                let k = kernel_identity_check(r, z, z.re / 2.0, &cfg).unwrap();
                assert!(k.residual <= 1e-8, "r = {r}, z = {z}: {k:?}");
                assert!(k.smoothing_bias < 1e-6);
            }
        }
    }

    #[test]
    fn kernel_check_rejects_bad_input() {
        let cfg = KernelCheckConfig::default();
        assert!(kernel_identity_check(1.0, c(0.5, 0.0), 0.2, &cfg).is_err());
        assert!(kernel_identity_check(2.0, c(1.2, 0.0), 0.2, &cfg).is_err());
        assert!(kernel_identity_check(2.0, c(0.5, 0.0), 0.6, &cfg).is_err());
    }
}
