use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Term counts for Euler–Maclaurin evaluation of ζ(s) and ζ(s, a).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionProfile {
    /// Terms summed directly before the Euler–Maclaurin tail.
    pub zeta_series_terms: u32,
    /// Highest derivative order in the correction (even, so `order / 2` Bernoulli terms).
    pub euler_maclaurin_correction_order: u32,
    /// Accuracy the profile is expected to deliver; propagated into error bars.
    pub target_abs_error: f64,
}

impl Default for PrecisionProfile {
    fn default() -> Self {
        Self {
            zeta_series_terms: 50,
            euler_maclaurin_correction_order: 24,
            target_abs_error: 1e-10,
        }
    }
}

impl PrecisionProfile {
    pub fn validate(&self) -> Result<()> {
        let order = self.euler_maclaurin_correction_order;
        if order < 2 || order % 2 != 0 || order as usize > 2 * BERNOULLI_2K.len() {
            return Err(Error::Invalid(format!(
                "correction order must be even and in 2..={}, got {order}",
                2 * BERNOULLI_2K.len()
            )));
        }
        if self.zeta_series_terms < 10 {
            return Err(Error::Invalid("zeta_series_terms must be at least 10".into()));
        }
        if !(self.target_abs_error > 0.0) {
            return Err(Error::Invalid("target_abs_error must be positive".into()));
        }
        Ok(())
    }
}

/// `B_{2k}` for k = 1..=20 as (numerator, denominator).
const BERNOULLI_2K: [(f64, f64); 20] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
    (-26315271553053477373.0, 1919190.0),
    (2929993913841559.0, 6.0),
    (-261082718496449122051.0, 13530.0),
];

/// `B_{2k} / (2k)!` for k = 1..=count.
fn bernoulli_over_factorial(count: usize) -> impl Iterator<Item = f64> {
    let mut fact = 1.0;
    BERNOULLI_2K
        .iter()
        .take(count)
        .enumerate()
        .map(move |(i, &(num, den))| {
            let k2 = 2 * (i + 1);
            fact *= ((k2 - 1) * k2) as f64;
            num / den / fact
        })
}

/// Euler–Maclaurin tail `Σ_{n >= 0} (n + x)^{-s}` for `x` large relative to `|s|`.
fn euler_maclaurin_tail(s: Complex64, x: f64, prof: &PrecisionProfile) -> Complex64 {
    let lx = x.ln();
    let x_neg_s = (-s * lx).exp();
    let mut total = x_neg_s * x / (s - 1.0) + 0.5 * x_neg_s;
    // running (s)_{2k-1} x^{-s-2k+1}
    let mut rising = s;
    let mut power = x_neg_s / x;
    let x2 = x * x;
    let terms = (prof.euler_maclaurin_correction_order / 2) as usize;
    for (k, b) in bernoulli_over_factorial(terms).enumerate() {
        total += b * rising * power;
        let k2 = (2 * (k + 1)) as f64;
        rising *= (s + k2 - 1.0) * (s + k2);
        power /= x2;
    }
    total
}

/// Riemann ζ(s) for `s != 1`, by Euler–Maclaurin summation.
pub fn riemann_zeta(s: Complex64, prof: &PrecisionProfile) -> Result<Complex64> {
    hurwitz_zeta_with(s, 1.0, prof)
}

/// Hurwitz ζ(s, a) for `a > 0`, `s != 1`, with the default profile.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    hurwitz_zeta_with(s, a, &PrecisionProfile::default())
}

pub fn hurwitz_zeta_with(s: Complex64, a: f64, prof: &PrecisionProfile) -> Result<Complex64> {
    prof.validate()?;
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("zeta at s = 1".into()));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("Hurwitz zeta needs a > 0, got {a}")));
    }
    // Direct terms grow like n^{-Re s}; for Re s < 0 using fewer of them limits
    // cancellation, and the tail stays accurate while 2πx dominates |s| + order.
    let wanted = (0.45 * s.norm()).ceil() as u32 + 10;
    let n = wanted.clamp(10, prof.zeta_series_terms);
    let mut direct = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        direct += (-s * (k as f64 + a).ln()).exp();
    }
    Ok(direct + euler_maclaurin_tail(s, n as f64 + a, prof))
}

/// Constant term of ζ(s, a) at s = 1, i.e. `lim (ζ(s, a) - 1/(s - 1)) = -ψ(a)`.
pub fn hurwitz_constant_term(a: f64, prof: &PrecisionProfile) -> Result<f64> {
    prof.validate()?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("Hurwitz zeta needs a > 0, got {a}")));
    }
    let n = 10u32.max(prof.zeta_series_terms / 5);
    let direct: f64 = (0..n).rev().map(|k| 1.0 / (k as f64 + a)).sum();
    let x = n as f64 + a;
    // Euler–Maclaurin at s = 1: x^{1-s}/(s-1) contributes -log x
    let mut total = direct - x.ln() + 0.5 / x;
    let mut power = 1.0 / (x * x);
    for (i, &(num, den)) in BERNOULLI_2K
        .iter()
        .take((prof.euler_maclaurin_correction_order / 2) as usize)
        .enumerate()
    {
        // (1)_{2k-1} / (2k)! = 1 / (2k)
        let k2 = (2 * (i + 1)) as f64;
        total += num / den / k2 * power;
        power /= x * x;
    }
    Ok(total)
}
