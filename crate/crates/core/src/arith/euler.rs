use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{gcd, p_pow_neg, FactoredInt, PrimeSieve};
use crate::error::{Error, Result};

/// Truncation control for products over primes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProductConfig {
    /// Largest prime included in the truncated product.
    pub prime_cutoff: u64,
    /// Attach a bound on the omitted tail. When off, the error bar is 0.
    pub tail_estimate: bool,
}

impl Default for EulerProductConfig {
    fn default() -> Self {
        Self {
            prime_cutoff: 1_000_000,
            tail_estimate: true,
        }
    }
}

impl EulerProductConfig {
    pub fn with_cutoff(prime_cutoff: u64) -> Self {
        Self {
            prime_cutoff,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.prime_cutoff < 2 {
            return Err(Error::Invalid("prime_cutoff must be at least 2".into()));
        }
        let bound = PrimeSieve::global().bound();
        if self.prime_cutoff > bound {
            return Err(Error::SieveBound(self.prime_cutoff, bound));
        }
        Ok(())
    }
}

/// A complex value with an absolute error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    #[serde(with = "crate::serde_complex")]
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: Complex64) -> Self {
        Self { value, error: 0.0 }
    }

    /// True when `other` lies within the combined error bars, plus `slack`.
    pub fn agrees_with(&self, other: &Estimate, slack: f64) -> bool {
        (self.value - other.value).norm() <= self.error + other.error + slack
    }
}

/// Upper bound for `Σ_{p > n} p^{-σ}`, `σ > 1`, from `π(x) < 1.26 x / log x`
/// and partial summation.
pub fn prime_tail_bound(n: u64, sigma: f64) -> f64 {
    assert!(sigma > 1.0, "tail bound needs sigma > 1");
    let n = n.max(2) as f64;
    1.26 * sigma * n.powf(1.0 - sigma) / ((sigma - 1.0) * n.ln())
}

/// Multiplies `local(p)` over primes `p <= cutoff` not in `skip`, and bounds
/// the tail assuming `|local(p) - 1| <= c_max p^{-sigma_min}` beyond the cutoff.
fn truncated_product<F>(
    skip: &FactoredInt,
    cfg: &EulerProductConfig,
    c_max: f64,
    sigma_min: f64,
    mut local: F,
) -> Result<Estimate>
where
    F: FnMut(u64, f64) -> Complex64,
{
    cfg.validate()?;
    let sieve = PrimeSieve::global();
    let count = sieve.prime_count(cfg.prime_cutoff);
    let mut value = Complex64::new(1.0, 0.0);
    for (&p, &lp) in sieve.primes()[..count].iter().zip(&sieve.log_primes()[..count]) {
        if skip.has_prime(p) {
            continue;
        }
        let f = local(p, lp);
        if f.norm() == 0.0 {
            return Err(Error::ZeroFactor(p));
        }
        value *= f;
    }
    let error = if cfg.tail_estimate {
        let tail = c_max * prime_tail_bound(cfg.prime_cutoff, sigma_min);
        value.norm() * tail.exp_m1()
    } else {
        0.0
    };
    Ok(Estimate { value, error })
}

#[inline]
fn pow_neg(lp: f64, s: Complex64) -> Complex64 {
    (-s * lp).exp()
}

/// Truncated `∏_{p ∤ q} (1 - p^{-s-w} - 2p^{-1-w} + 2p^{-1-s-w} + p^{-2-2w} - p^{-2-2w-s})`,
/// defined for `Re(w) > 0` and `Re(s + w) > 1`.
pub fn euler_p(q: &FactoredInt, w: Complex64, s: Complex64, cfg: &EulerProductConfig) -> Result<Estimate> {
    if w.re <= 0.0 || (s + w).re <= 1.0 {
        return Err(Error::Domain(format!(
            "euler product needs Re(w) > 0 and Re(s + w) > 1, got w = {w}, s = {s}"
        )));
    }
    let sigma_min = (s + w).re.min(1.0 + w.re);
    truncated_product(q, cfg, 7.0, sigma_min, |_, lp| {
        let a = pow_neg(lp, s + w);
        let b = pow_neg(lp, 1.0 + w);
        let pinv = (-lp).exp();
        // p^{-1-s-w} = a/p, p^{-2-2w} = b², p^{-2-2w-s} = ab/p
        1.0 - a - 2.0 * b + 2.0 * a * pinv + b * b - a * b * pinv
    })
}

/// `R(s; u, v) = ∏_{p | v}(1 - p^{-s-1}) ∏_{p ∤ uv}(1 + 1/(p^{s+1}(p-1)))`, for `Re(s) > -1`
/// and coprime `u`, `v`.
pub fn r_factor(s: Complex64, u: &FactoredInt, v: &FactoredInt, cfg: &EulerProductConfig) -> Result<Estimate> {
    check_coprime(u, v)?;
    if s.re <= -1.0 {
        return Err(Error::Domain(format!("R(s; u, v) needs Re(s) > -1, got {s}")));
    }
    let finite = v
        .primes()
        .fold(Complex64::new(1.0, 0.0), |acc, p| acc * (1.0 - p_pow_neg(p, s + 1.0)));
    let uv = u.mul(v)?;
    let tail = truncated_product(&uv, cfg, 2.0, s.re + 2.0, |p, lp| {
        1.0 + pow_neg(lp, s + 1.0) / (p - 1) as f64
    })?;
    Ok(scale(tail, finite))
}

/// The three-part product
/// `∏_{p|v}(1 - p^{-1-w}) ∏_{p|u, p∤v}(1 + 1/(p^{1+w}(p-1)) - 1/(p-1)) ∏_{p∤uv}(1 + (p^{-w}-1)/(p(p-1)))`
/// for `Re(w) > -1` and coprime `u`, `v`.
pub fn r1_factor(w: Complex64, u: &FactoredInt, v: &FactoredInt, cfg: &EulerProductConfig) -> Result<Estimate> {
    check_coprime(u, v)?;
    if w.re <= -1.0 {
        return Err(Error::Domain(format!("R1(w; u, v) needs Re(w) > -1, got {w}")));
    }
    let mut finite = Complex64::new(1.0, 0.0);
    for p in v.primes() {
        finite *= 1.0 - p_pow_neg(p, w + 1.0);
    }
    for p in u.primes() {
        let pm1 = (p - 1) as f64;
        finite *= 1.0 + p_pow_neg(p, w + 1.0) / pm1 - 1.0 / pm1;
    }
    let uv = u.mul(v)?;
    let sigma_min = 2.0 + w.re.min(0.0);
    let tail = truncated_product(&uv, cfg, 4.0, sigma_min, |p, lp| {
        let pf = p as f64;
        1.0 + (pow_neg(lp, w) - 1.0) / (pf * (pf - 1.0))
    })?;
    Ok(scale(tail, finite))
}

fn scale(e: Estimate, by: Complex64) -> Estimate {
    Estimate {
        value: e.value * by,
        error: e.error * by.norm(),
    }
}

fn check_coprime(u: &FactoredInt, v: &FactoredInt) -> Result<()> {
    let g = gcd(u.value(), v.value());
    if g != 1 {
        return Err(Error::NotCoprime(u.value(), v.value(), g));
    }
    Ok(())
}
