//! Exact multiplicative arithmetic and truncated Euler products.
//!
//! Everything integer-valued here (φ, μ, φ*, gcd) is computed exactly in
//! `u64`/`i64`. Euler products over primes are truncated at a configurable
//! cutoff and carry an explicit tail error bar.

mod euler;
mod sieve;

pub use euler::{euler_p, prime_tail_bound, r1_factor, r_factor, Estimate, EulerProductConfig};
pub use sieve::{PrimeSieve, DEFAULT_SIEVE_BOUND};

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{riemann_zeta, PrecisionProfile};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FactoredInt {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn new(n: u64) -> Result<Self> {
        factorize(n)
    }

    /// Builds from explicit `(prime, exponent)` pairs, checking every invariant.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let sieve = PrimeSieve::global();
        let mut value: u64 = 1;
        let mut last = 1;
        for &(p, e) in &factors {
            if p <= last {
                return Err(Error::Invalid("primes must be strictly increasing".into()));
            }
            if e == 0 {
                return Err(Error::Invalid("exponents must be positive".into()));
            }
            if !sieve.is_prime(p)? {
                return Err(Error::Invalid(format!("{p} is not prime")));
            }
            value = p
                .checked_pow(e)
                .and_then(|pe| value.checked_mul(pe))
                .ok_or_else(|| Error::Invalid("value overflows u64".into()))?;
            last = p;
        }
        Ok(Self { value, factors })
    }

    pub fn one() -> Self {
        Self {
            value: 1,
            factors: Vec::new(),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn divides(&self, n: u64) -> bool {
        n % self.value == 0
    }

    pub fn has_prime(&self, p: u64) -> bool {
        self.factors.binary_search_by_key(&p, |&(q, _)| q).is_ok()
    }

    /// Product of two factored integers, merging factor lists.
    pub fn mul(&self, other: &FactoredInt) -> Result<FactoredInt> {
        let value = self
            .value
            .checked_mul(other.value)
            .ok_or_else(|| Error::Invalid("product overflows u64".into()))?;
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            match (self.factors.get(i), other.factors.get(j)) {
                (Some(&(p, e)), Some(&(q, f))) if p == q => {
                    factors.push((p, e + f));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, e)), Some(&(q, _))) if p < q => {
                    factors.push((p, e));
                    i += 1;
                }
                (Some(_), Some(&(q, f))) => {
                    factors.push((q, f));
                    j += 1;
                }
                (Some(&pe), None) => {
                    factors.push(pe);
                    i += 1;
                }
                (None, Some(&qf)) => {
                    factors.push(qf);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ok(FactoredInt { value, factors })
    }

    /// All positive divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl TryFrom<u64> for FactoredInt {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        factorize(n)
    }
}

impl From<FactoredInt> for u64 {
    fn from(n: FactoredInt) -> u64 {
        n.value
    }
}

/// Factors `n` against the shared sieve. Rejects 0 and inputs beyond the
/// square of the sieve bound.
pub fn factorize(n: u64) -> Result<FactoredInt> {
    let factors = PrimeSieve::global().factor_pairs(n)?;
    Ok(FactoredInt { value: n, factors })
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn euler_phi(n: &FactoredInt) -> u64 {
    n.factors.iter().fold(1, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

pub fn moebius(n: &FactoredInt) -> i8 {
    if n.factors.iter().any(|&(_, e)| e >= 2) {
        0
    } else if n.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of primitive characters mod `q`, i.e. the Dirichlet convolution
/// of μ and φ evaluated at `q`.
pub fn phi_star(q: &FactoredInt) -> u64 {
    q.factors.iter().fold(1, |acc, &(p, e)| {
        let local = match e {
            1 => p - 2,
            _ => p.pow(e - 2) * (p - 1) * (p - 1),
        };
        acc * local
    })
}

/// `∏_{p | q} (1 - p^{-s})`.
pub fn phi_cap(q: &FactoredInt, s: Complex64) -> Complex64 {
    q.primes()
        .fold(Complex64::new(1.0, 0.0), |acc, p| acc * (1.0 - p_pow_neg(p, s)))
}

/// `ζ(s)` with the Euler factors at primes dividing `q` removed.
pub fn zeta_q(q: &FactoredInt, s: Complex64) -> Result<Complex64> {
    zeta_q_with(q, s, &PrecisionProfile::default())
}

pub fn zeta_q_with(q: &FactoredInt, s: Complex64, prof: &PrecisionProfile) -> Result<Complex64> {
    Ok(riemann_zeta(s, prof)? * phi_cap(q, s))
}

/// `p^{-s}` for a prime (or any positive integer) `p`.
#[inline]
pub(crate) fn p_pow_neg(p: u64, s: Complex64) -> Complex64 {
    (-s * (p as f64).ln()).exp()
}
