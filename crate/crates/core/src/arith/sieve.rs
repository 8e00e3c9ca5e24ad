use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default sieve bound: factorization inputs up to its square are accepted.
pub const DEFAULT_SIEVE_BOUND: u64 = 1_000_000;

/// Smallest-prime-factor table up to `bound`, plus the primes and their logarithms.
#[derive(Debug)]
pub struct PrimeSieve {
    bound: u64,
    spf: Vec<u32>,
    primes: Vec<u64>,
    log_primes: Vec<f64>,
}

impl PrimeSieve {
    pub fn new(bound: u64) -> Self {
        let bound = bound.max(2);
        let n = bound as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let si = spf[i];
            for &p in &primes {
                let p32 = p as u32;
                if p32 > si || i * p as usize > n {
                    break;
                }
                spf[i * p as usize] = p32;
            }
        }
        let log_primes = primes.iter().map(|&p| (p as f64).ln()).collect();
        Self {
            bound,
            spf,
            primes,
            log_primes,
        }
    }

    /// Shared sieve with the default bound, built on first use.
    pub fn global() -> &'static PrimeSieve {
        static SIEVE: OnceLock<PrimeSieve> = OnceLock::new();
        SIEVE.get_or_init(|| PrimeSieve::new(DEFAULT_SIEVE_BOUND))
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn log_primes(&self) -> &[f64] {
        &self.log_primes
    }

    /// Number of sieved primes `<= x`.
    pub fn prime_count(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.bound {
            return None;
        }
        Some(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n < 2 {
            return Ok(false);
        }
        if n <= self.bound {
            return Ok(self.spf[n as usize] as u64 == n);
        }
        let f = self.factor_pairs(n)?;
        Ok(f.len() == 1 && f[0].1 == 1)
    }

    /// Prime factorization as ascending `(prime, exponent)` pairs.
    pub fn factor_pairs(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 {
            return Err(Error::Domain("cannot factor 0".into()));
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n;
        if m <= self.bound {
            while m > 1 {
                let p = self.spf[m as usize] as u64;
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                out.push((p, e));
            }
            return Ok(out);
        }
        if m / self.bound > self.bound {
            return Err(Error::SieveBound(n, self.bound.saturating_mul(self.bound)));
        }
        for &p in &self.primes {
            if p * p > m {
                break;
            }
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                out.push((p, e));
                if m <= self.bound {
                    let rest = self.factor_pairs(m)?;
                    out.extend(rest);
                    return Ok(out);
                }
            }
        }
        if m > 1 {
            out.push((m, 1));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sieve_lists_primes() {
        let s = PrimeSieve::new(30);
        assert_eq!(s.primes(), &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(s.prime_count(10), 4);
        assert_eq!(s.smallest_prime_factor(91), None);
        assert_eq!(s.smallest_prime_factor(21), Some(3));
    }

    #[test]
    fn factors_beyond_table_by_trial_division() {
        let s = PrimeSieve::new(100);
        assert_eq!(s.factor_pairs(9991).unwrap(), vec![(97, 1), (103, 1)]);
        assert_eq!(s.factor_pairs(2 * 4999).unwrap(), vec![(2, 1), (4999, 1)]);
        assert!(s.factor_pairs(10_007 * 10_009).is_err());
        assert!(s.is_prime(7919).unwrap());
    }
}
