use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pairwise_sum;
use crate::error::{Error, Result};
use crate::lfunction::ShiftPair;
use crate::special::log_gamma;

/// A truncated vertical line `Re(s) = real_part`, `|Im(s)| <= im_cutoff`,
/// sampled by the trapezoid rule with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub real_part: f64,
    pub im_cutoff: f64,
    pub step: f64,
}

/// Envelope below which the integrand is treated as zero when choosing `im_cutoff`.
pub const ENVELOPE_TOL: f64 = 1e-16;

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            real_part: 1.0,
            im_cutoff: 40.0,
            step: 0.05,
        }
    }
}

impl ContourSpec {
    pub fn new(real_part: f64, im_cutoff: f64, step: f64) -> Result<Self> {
        let c = Self {
            real_part,
            im_cutoff,
            step,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.real_part.is_finite() {
            return Err(Error::Invalid("contour real part must be finite".into()));
        }
        if !(self.step > 0.0) || !(self.im_cutoff > 0.0) {
            return Err(Error::Invalid("contour step and cutoff must be positive".into()));
        }
        let ratio = self.im_cutoff / self.step;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Invalid(format!(
                "im_cutoff / step must be an integer, got {} / {}",
                self.im_cutoff, self.step
            )));
        }
        Ok(())
    }

    pub fn half_count(&self) -> usize {
        (self.im_cutoff / self.step).round() as usize
    }

    /// Ordinates `-T, -T + h, …, T` with trapezoid weights (halved at the ends).
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.half_count();
        (0..=2 * n).map(move |j| {
            let t = (j as f64 - n as f64) * self.step;
            let w = if j == 0 || j == 2 * n { 0.5 } else { 1.0 } * self.step;
            (t, w)
        })
    }

    /// Copy with `im_cutoff` raised in steps of 5 until `envelope(±T) < tol`.
    pub fn fit_cutoff<F: Fn(Complex64) -> f64>(&self, envelope: F, tol: f64, max: f64) -> Result<Self> {
        let mut t = 10.0f64;
        loop {
            let s_up = Complex64::new(self.real_part, t);
            let s_dn = Complex64::new(self.real_part, -t);
            if envelope(s_up) < tol && envelope(s_dn) < tol {
                break;
            }
            t += 5.0;
            if t > max {
                return Err(Error::Domain(format!(
                    "integrand envelope above {tol:e} up to |Im s| = {max}"
                )));
            }
        }
        let n = (t / self.step).ceil();
        Self::new(self.real_part, n * self.step, self.step)
    }
}

/// `(1/2πi) ∫_{(c)} f(s) ds/s`, `c != 0`, with `f` analytic near the segment
/// between the line and 0.
///
/// The pole at 0 is removed by subtracting `f(0) e^{s²}/s`, whose line
/// integral is `±f(0)/2` for `c ≷ 0`. What remains is analytic at `s = 0`, so
/// the step only has to resolve the other singularities of `f`.
pub fn line_integral_over_s<F>(f: F, f0: Complex64, contour: &ContourSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    contour.validate()?;
    let c = contour.real_part;
    if c == 0.0 {
        return Err(Error::Domain("line through the pole at s = 0".into()));
    }
    let nodes: Vec<(f64, f64)> = contour.nodes().collect();
    let terms: Result<Vec<Complex64>> = nodes
        .par_iter()
        .map(|&(t, w)| {
            let s = Complex64::new(c, t);
            Ok(w * (f(s)? - f0 * (s * s).exp()) / s)
        })
        .collect();
    let sum = pairwise_sum(&terms?) / (2.0 * PI);
    Ok(sum + c.signum() * f0 / 2.0)
}

/// `Ṽ_{α,β}(s) = Γ((s + ½ + α)/2) Γ((s + ½ + β)/2) (1 - (2s/(α+β))²)`.
pub fn v_tilde(s: Complex64, shifts: &ShiftPair) -> Result<Complex64> {
    let (a, b) = (shifts.alpha(), shifts.beta());
    let lg = log_gamma((s + 0.5 + a) / 2.0)? + log_gamma((s + 0.5 + b) / 2.0)?;
    let r = 2.0 * s / shifts.sum();
    Ok(lg.exp() * (1.0 - r * r))
}

/// Real part of the rightmost pole of Ṽ.
fn rightmost_gamma_pole(shifts: &ShiftPair) -> f64 {
    -0.5 - shifts.alpha().re.min(shifts.beta().re)
}

/// `V_{α,β}(x) = (1/2πi) ∫_{(c)} Ṽ(s) x^{-s} ds/s` on the given line.
pub fn v_ab(x: f64, shifts: &ShiftPair, contour: &ContourSpec) -> Result<Complex64> {
    VLine::new(shifts, contour)?.eval(x)
}

/// Precomputed node weights for one line; evaluation at `x` is a dot product
/// with `x^{-s_j}`.
#[derive(Debug, Clone)]
struct VLine {
    contour: ContourSpec,
    /// `(s_j, w_j Ṽ(s_j) / (2π s_j))`
    weights: Vec<(Complex64, Complex64)>,
    /// `Ṽ(0)/2 - Σ_j w_j Ṽ(0) e^{s_j²} / (2π s_j)`
    constant: Complex64,
}

impl VLine {
    fn new(shifts: &ShiftPair, contour: &ContourSpec) -> Result<Self> {
        contour.validate()?;
        let c = contour.real_part;
        if c == 0.0 || c <= rightmost_gamma_pole(shifts) {
            return Err(Error::Domain(format!(
                "V line Re(s) = {c} must avoid 0 and lie right of the Gamma poles"
            )));
        }
        let v0 = v_tilde(Complex64::new(0.0, 0.0), shifts)?;
        let mut weights = Vec::with_capacity(2 * contour.half_count() + 1);
        let mut sub = Vec::with_capacity(weights.capacity());
        for (t, w) in contour.nodes() {
            let s = Complex64::new(c, t);
            let k = w / (2.0 * PI * s);
            weights.push((s, k * v_tilde(s, shifts)?));
            sub.push(k * v0 * (s * s).exp());
        }
        let constant = v0 / 2.0 - pairwise_sum(&sub);
        Ok(Self {
            contour: *contour,
            weights,
            constant,
        })
    }

    fn eval(&self, x: f64) -> Result<Complex64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("V needs x > 0, got {x}")));
        }
        let lx = x.ln();
        let mut acc = Vec::with_capacity(self.weights.len());
        for &(s, k) in &self.weights {
            acc.push(k * (-s * lx).exp());
        }
        Ok(pairwise_sum(&acc) + self.constant)
    }
}

/// `V_{α,β}` on `(0, ∞)`: a line left of 0 serves `x < 1` and `Re(s) = 1`
/// serves `x >= 1`, so `x^{-s}` never amplifies rounding error.
#[derive(Debug, Clone)]
pub struct VKernel {
    shifts: ShiftPair,
    left: VLine,
    right: VLine,
}

impl VKernel {
    /// Lines and cutoffs chosen from the shifts; `max_step` caps the spacing.
    pub fn new(shifts: &ShiftPair, max_step: f64) -> Result<Self> {
        let pole = rightmost_gamma_pole(shifts);
        if pole > -0.05 {
            return Err(Error::InvalidShift(format!(
                "Gamma pole of V at Re(s) = {pole} is too close to 0"
            )));
        }
        let envelope = |s: Complex64| v_tilde(s, shifts).map(|v| (v / s).norm()).unwrap_or(f64::INFINITY);
        let line = |c: f64| -> Result<VLine> {
            // nearest singularity at horizontal distance |c - pole|; e^{-2π·6} is below 1e-16
            let step = max_step.min((c - pole) / 6.0);
            let base = ContourSpec {
                real_part: c,
                im_cutoff: step,
                step,
            };
            VLine::new(shifts, &base.fit_cutoff(envelope, ENVELOPE_TOL, 400.0)?)
        };
        Ok(Self {
            shifts: *shifts,
            left: line(pole / 2.0)?,
            right: line(1.0)?,
        })
    }

    pub fn shifts(&self) -> &ShiftPair {
        &self.shifts
    }

    pub fn contours(&self) -> (ContourSpec, ContourSpec) {
        (self.left.contour, self.right.contour)
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if x < 1.0 {
            self.left.eval(x)
        } else {
            self.right.eval(x)
        }
    }

    /// Smallest `X` on a grid of 1/4 such that `|V(y)| < tol` for all grid `y` in `[X, 100]`.
    pub fn decay_cutoff(&self, tol: f64) -> Result<f64> {
        let mut cut = 0.25;
        let mut y = 100.0;
        while y > 0.25 {
            if self.eval(y)?.norm() >= tol {
                cut = y + 0.25;
                break;
            }
            y -= 0.25;
        }
        Ok(cut)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shifts() -> ShiftPair {
        ShiftPair::real(0.01, 0.02).unwrap()
    }

    #[test]
    fn contour_validation() {
        assert!(ContourSpec::new(1.0, 40.0, 0.05).is_ok());
        assert!(ContourSpec::new(1.0, 40.01, 0.05).is_err());
        assert!(ContourSpec::new(1.0, 40.0, 0.0).is_err());
        assert_eq!(ContourSpec::default().nodes().count(), 1601);
    }

    #[test]
    fn v_tilde_examples() {
        let s = shifts();
        let half = s.sum() / 2.0;
        assert!(v_tilde(half, &s).unwrap().norm() <= 1e-14);
        assert!(v_tilde(-half, &s).unwrap().norm() <= 1e-14);
        let v0 = v_tilde(c(0.0, 0.0), &s).unwrap();
        let want = gamma(c(0.255, 0.0)).unwrap() * gamma(c(0.26, 0.0)).unwrap();
        assert!((v0 - want).norm() < 1e-12);
        let cs = ShiftPair::new(c(0.1, 0.05), c(0.03, 0.0)).unwrap();
        assert!(v_tilde(cs.sum() / 2.0, &cs).unwrap().norm() <= 1e-14);
    }

    #[test]
    fn line_integral_of_known_transform() {
        // (1/2πi)∫ Γ(s) x^{-s} ds/s over Re s = c > 0 equals Γ(0, x) + … ; use e^{-x}: ∫Γ(s)x^{-s}ds = 2πi e^{-x}
        // so with f(s) = s Γ(s) x^{-s}, f(0) = 1 and the result is e^{-x}.
        for x in [0.3, 1.0, 4.0] {
            let f = |s: Complex64| Ok((log_gamma(s + 1.0)? - s * f64::ln(x)).exp());
            for cr in [0.1, 1.0] {
                let contour = ContourSpec::new(cr, 60.0, 0.05).unwrap();
                let got = line_integral_over_s(f, c(1.0, 0.0), &contour).unwrap();
                assert!((got - (-x as f64).exp()).norm() < 1e-12, "x = {x}, c = {cr}: {got}");
            }
        }
    }

    // Values from a 30-digit mpmath quadrature of the defining integral.
    const V_REFERENCE: [(f64, f64); 5] = [
        (1e-6, 96.364_304_408_897_7),
        (0.01, 1_792.430_324_292_64),
        (1.0, -3_930.109_640_110_3),
        (5.0, -7.221_565_647_019_22),
        (15.0, -4.584_527_910_126_64e-8),
    ];

    #[test]
    fn v_matches_reference_values() {
        let k = VKernel::new(&shifts(), 0.05).unwrap();
        for (x, want) in V_REFERENCE {
            let got = k.eval(x).unwrap();
            assert!((got.re - want).abs() < 1e-9, "x = {x}: {got} vs {want}");
            assert!(got.im.abs() < 1e-9);
        }
        assert!(k.eval(60.0).unwrap().norm() < 1e-10);
    }

    #[test]
    fn v_contour_independence() {
        let s = shifts();
        let one = ContourSpec::new(1.0, 40.0, 0.05).unwrap();
        let two = ContourSpec::new(2.0, 40.0, 0.05).unwrap();
        for x in [0.5, 1.0, 5.0] {
            let a = v_ab(x, &s, &one).unwrap();
            let b = v_ab(x, &s, &two).unwrap();
            assert!((a - b).norm() < 1e-8, "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn v_kernel_lines_agree() {
        let s = ShiftPair::new(c(0.1, 0.05), c(0.03, 0.0)).unwrap();
        let k = VKernel::new(&s, 0.05).unwrap();
        for x in [0.3, 0.9, 1.1, 3.0] {
            let a = k.left.eval(x).unwrap();
            let b = k.right.eval(x).unwrap();
            assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "x = {x}");
        }
    }
}
