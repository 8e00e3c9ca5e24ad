use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;

// g = 7, n = 9 coefficients (as published with the GNU Scientific Library).
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `0.5 * ln(2π)`
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Principal branch of `log Γ(z)`.
///
/// Lanczos approximation on `Re(z) >= 0.5`; to the left the argument is
/// shifted up with `Γ(z) = Γ(z + n) / (z (z + 1) ... (z + n - 1))`, which keeps
/// the branch continuous off the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("log_gamma of non-finite {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(format!("Gamma at {}", z.re)));
    }
    if z.re >= 0.5 {
        return Ok(lanczos(z));
    }
    let n = (0.5 - z.re).ceil() as u32;
    let mut shift = Complex64::new(0.0, 0.0);
    for k in 0..n {
        shift += (z + k as f64).ln();
    }
    Ok(lanczos(z + n as f64) - shift)
}

/// `Γ(z)`; overflows to infinity rather than erroring for huge results.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|l| l.exp())
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// Distance from `z` to the nearest pole of Γ (the nonpositive integers).
pub fn gamma_pole_distance(z: Complex64) -> f64 {
    let nearest = if z.re > 0.0 { 0.0 } else { z.re.round() };
    (z - nearest).norm()
}

/// `sin(πz)` used by the reflection checks.
pub fn sin_pi(z: Complex64) -> Complex64 {
    (z * PI).sin()
}
