//! The smooth weight W, its Mellin transform, the cutoff V_{α,β} as a
//! vertical-line integral, and the kernel H(w, z).

mod contour;
mod kernel;

pub use contour::{line_integral_over_s, v_ab, v_tilde, ContourSpec, VKernel, ENVELOPE_TOL};
pub use kernel::{h_kernel, h_kernel_forms, kernel_identity_check, KernelCheck, KernelCheckConfig};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunction::ShiftPair;

/// The bump `W(x) = exp(-σ / ((x - 1)(2 - x)))` on `(1, 2)` and the node count
/// for its Mellin transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub bump_sharpness: f64,
    /// Starting trapezoid node count on `[1, 2]`; doubled until converged.
    pub quadrature_nodes: usize,
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self {
            bump_sharpness: 1.0,
            quadrature_nodes: 256,
        }
    }
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.bump_sharpness > 0.0) || !self.bump_sharpness.is_finite() {
            return Err(Error::Invalid("bump_sharpness must be positive".into()));
        }
        if self.quadrature_nodes < 16 {
            return Err(Error::Invalid("quadrature_nodes must be at least 16".into()));
        }
        Ok(())
    }
}

pub fn weight_w(x: f64, spec: &WeightSpec) -> f64 {
    if x <= 1.0 || x >= 2.0 {
        return 0.0;
    }
    (-spec.bump_sharpness / ((x - 1.0) * (2.0 - x))).exp()
}

/// `W_{α,β}(x) = x^{1 + (α+β)/2} W(x)`.
pub fn weight_w_ab(x: f64, shifts: &ShiftPair, spec: &WeightSpec) -> Complex64 {
    let w = weight_w(x, spec);
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    w * ((1.0 + shifts.sum() / 2.0) * x.ln()).exp()
}

const MELLIN_TOL: f64 = 1e-15;
const MELLIN_MAX_NODES: usize = 1 << 16;

/// `W̃_{α,β}(s) = ∫ W_{α,β}(x) x^{s-1} dx`.
///
/// W and all its derivatives vanish at 1 and 2, so the trapezoid rule on
/// `[1, 2]` converges faster than any power of the node count. Nodes are
/// doubled until two successive values agree to `1e-15`.
pub fn mellin_w(s: Complex64, shifts: &ShiftPair, spec: &WeightSpec) -> Result<Complex64> {
    mellin_w_exponent(s + shifts.sum() / 2.0, spec)
}

/// `∫_1^2 W(x) x^{e} dx`.
pub(crate) fn mellin_w_exponent(e: Complex64, spec: &WeightSpec) -> Result<Complex64> {
    spec.validate()?;
    let f = |x: f64| weight_w(x, spec) * (e * x.ln()).exp();
    let mut n = spec.quadrature_nodes;
    // endpoint values are zero
    let mut raw: Complex64 = (1..n).map(|j| f(1.0 + j as f64 / n as f64)).sum();
    let mut value = raw / n as f64;
    while n < MELLIN_MAX_NODES {
        // refining reuses the old nodes; only odd indices are new
        let h = 1.0 / (2 * n) as f64;
        raw += (0..n).map(|j| f(1.0 + (2 * j + 1) as f64 * h)).sum::<Complex64>();
        n *= 2;
        let next = raw / n as f64;
        if (next - value).norm() <= MELLIN_TOL {
            return Ok(next);
        }
        value = next;
    }
    Err(Error::Domain(format!(
        "Mellin transform did not converge at exponent {e}"
    )))
}

/// Fixed-order pairwise sum, so results do not depend on how callers chunk work.
pub(crate) fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shifts() -> ShiftPair {
        ShiftPair::real(0.01, 0.02).unwrap()
    }

    /// Composite 20-point Gauss–Legendre on 64 panels; independent of the trapezoid path.
    fn gauss_mellin(e: Complex64) -> Complex64 {
        let (nodes, weights) = gauss_legendre_20();
        let panels = 64;
        let mut sum = c(0.0, 0.0);
        for k in 0..panels {
            let a = 1.0 + k as f64 / panels as f64;
            let half = 0.5 / panels as f64;
            for (&t, &w) in nodes.iter().zip(&weights) {
                let x = a + half * (1.0 + t);
                sum += w * half * weight_w(x, &WeightSpec::default()) * (e * x.ln()).exp();
            }
        }
        sum
    }

    /// Nodes by Newton iteration on P_20.
    fn gauss_legendre_20() -> (Vec<f64>, Vec<f64>) {
        let n = 20;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for i in 1..=n {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
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
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        (nodes, weights)
    }

    #[test]
    fn weight_examples() {
        let spec = WeightSpec::default();
        assert_eq!(weight_w(1.0, &spec), 0.0);
        assert_eq!(weight_w(3.0, &spec), 0.0);
        assert!((weight_w(1.5, &spec) - (-4f64).exp()).abs() < 1e-17);
        assert!((weight_w(1.5, &spec) - 0.018_315_638_9).abs() < 1e-10);
        let s = shifts();
        let got = weight_w_ab(1.5, &s, &spec);
        assert!((got.re - 1.5f64.powf(1.015) * weight_w(1.5, &spec)).abs() < 1e-16);
        assert_eq!(weight_w_ab(2.5, &s, &spec), c(0.0, 0.0));
        assert_eq!(weight_w_ab(1.3, &s, &spec), weight_w_ab(1.3, &s.swapped(), &spec));
    }

    #[test]
    fn mellin_matches_gauss_legendre() {
        let s = shifts();
        for z in [c(0.0, 0.0), c(1.0, 0.0), c(1.2, 7.0), c(2.0, -40.0), c(-0.4, 120.0)] {
            let got = mellin_w(z, &s, &WeightSpec::default()).unwrap();
            let want = gauss_mellin(z + s.sum() / 2.0);
            assert!((got - want).norm() < 1e-13, "s = {z}: {got} vs {want}");
        }
        // frozen from a 30-digit evaluation: ∫_1^2 W(x) x^{1.015} dx/x
        let w1 = mellin_w(
            c(1.0, 0.0),
            &ShiftPair::real(0.01, 0.02).unwrap(),
            &WeightSpec::default(),
        )
        .unwrap();
        assert!((w1.re - 0.010_609_804_966_806_616).abs() < 1e-15);
        assert!(w1.im.abs() < 1e-18);
    }

    #[test]
    fn mellin_reflection_shift() {
        let sp = ShiftPair::new(c(0.1, 0.05), c(0.03, -0.02)).unwrap();
        let spec = WeightSpec::default();
        for z in [c(0.3, 1.0), c(-0.2, 5.0), c(0.05, -3.0)] {
            let a = mellin_w(1.0 - sp.sum() + z, &sp, &spec).unwrap();
            let b = mellin_w(1.0 + z, &sp.reflected(), &spec).unwrap();
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn mellin_round_trip() {
        // W_{α,β}(x) = (1/2π) ∫ W̃(c + it) x^{-c-it} dt; spacing below 2π/ln 2 avoids aliasing on [1, 2]
        let s = shifts();
        let spec = WeightSpec::default();
        let (h, n) = (0.5, 1000);
        let vals: Vec<(f64, Complex64)> = (-n..=n)
            .map(|j| {
                let t = j as f64 * h;
                (t, mellin_w(c(2.0, t), &s, &spec).unwrap())
            })
            .collect();
        for x in [1.2, 1.5, 1.8] {
            let terms: Vec<Complex64> = vals
                .iter()
                .map(|&(t, m)| h * m * (-c(2.0, t) * f64::ln(x)).exp())
                .collect();
            let got = pairwise_sum(&terms) / (2.0 * PI);
            let want = weight_w_ab(x, &s, &spec);
            assert!((got - want).norm() < 1e-7, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn pairwise_sum_agrees_with_naive() {
        let xs: Vec<Complex64> = (0..1000).map(|i| c(1.0 / (i as f64 + 1.0), i as f64)).collect();
        let naive: Complex64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).norm() < 1e-9);
    }
}
