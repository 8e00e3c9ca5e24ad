//! Dirichlet characters mod q, built from the CRT decomposition of (Z/q)*.
//!
//! A character is an exponent vector over the local generators. Values are
//! looked up in a shared table of L-th roots of unity, L the lcm of the
//! generator orders, so χ(n) is an exact table entry rather than a fresh
//! `exp` call.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::arith::{euler_phi, factorize, gcd, moebius, FactoredInt, PrimeSieve};
use crate::error::{Error, Result};

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// One prime-power factor `p^k` of the modulus.
#[derive(Debug, Clone)]
struct Component {
    prime: u64,
    exp: u32,
    modulus: u64,
    /// Indices into the flattened generator list.
    first_gen: usize,
    gen_count: usize,
    /// `x mod p^k -> local exponents`, `NO_LOG` for non-units.
    /// Odd p: one entry per residue. 2^k with k >= 3: two entries (for -1, 5).
    logs: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generator {
    /// Generator as a residue mod the full modulus (1 in the other components).
    pub residue: u64,
    pub order: u64,
}

/// The group of characters mod q, with discrete-log tables.
#[derive(Debug)]
pub struct DirichletGroup {
    modulus: FactoredInt,
    components: Vec<Component>,
    generators: Vec<Generator>,
    root_order: u64,
    roots: Vec<Complex64>,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Smallest primitive root mod `p^k` for odd `p`.
fn primitive_root(p: u64, k: u32) -> Result<u64> {
    let pm1 = factorize(p - 1)?;
    let mut g = 2;
    loop {
        if g >= p {
            return Err(Error::Domain(format!("no primitive root found mod {p}")));
        }
        if pm1.primes().all(|r| pow_mod(g, (p - 1) / r, p) != 1) {
            break;
        }
        g += 1;
    }
    if k >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    Ok(g)
}

/// Solves `y ≡ x mod m_i` for the component and `y ≡ 1` mod the rest.
fn crt_embed(x: u64, comp_mod: u64, q: u64) -> u64 {
    if comp_mod == q {
        return x % q;
    }
    let rest = q / comp_mod;
    // y = 1 + rest * t with rest * t ≡ x - 1 mod comp_mod
    let inv = mod_inverse(rest % comp_mod, comp_mod).expect("CRT moduli are coprime");
    let t = mul_mod((x + comp_mod - 1) % comp_mod, inv, comp_mod);
    (1 + rest * t) % q
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

impl DirichletGroup {
    pub fn modulus(&self) -> &FactoredInt {
        &self.modulus
    }

    pub fn q(&self) -> u64 {
        self.modulus.value()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Group order, the product of the generator orders.
    pub fn order(&self) -> u64 {
        self.generators.iter().map(|g| g.order).product()
    }

    /// Exponent vector of `n` with respect to the generators, or `None` off units.
    pub fn discrete_log(&self, n: u64) -> Option<Vec<u64>> {
        let mut out = vec![0; self.generators.len()];
        self.log_into(n, &mut out).then_some(out)
    }

    fn log_into(&self, n: u64, out: &mut [u64]) -> bool {
        for c in &self.components {
            let x = (n % c.modulus) as usize;
            let stride = c.gen_count.max(1);
            let slot = &c.logs[x * stride..x * stride + stride];
            if slot[0] == NO_LOG {
                return false;
            }
            for j in 0..c.gen_count {
                out[c.first_gen + j] = slot[j] as u64;
            }
        }
        true
    }

    /// Phase of `χ(n)` as a multiple of `2π / root_order`, for the given exponents.
    fn phase(&self, exps: &[u64], n: u64, scratch: &mut [u64]) -> Option<u64> {
        if !self.log_into(n, scratch) {
            return None;
        }
        let l = self.root_order;
        let mut acc = 0u64;
        for ((g, &e), &lg) in self.generators.iter().zip(exps).zip(scratch.iter()) {
            let step = l / g.order;
            acc = (acc + mul_mod(mul_mod(e, lg, g.order), step, l)) % l;
        }
        Some(acc)
    }
}

/// Builds the character group mod `q`. Memory is `O(q)`.
pub fn build_group(q: &FactoredInt) -> Result<Arc<DirichletGroup>> {
    let bound = PrimeSieve::global().bound();
    if q.value() > bound {
        return Err(Error::SieveBound(q.value(), bound));
    }
    let mut components = Vec::new();
    let mut generators = Vec::new();
    for &(p, k) in q.factors() {
        let m = p.pow(k);
        let first_gen = generators.len();
        let (gens, logs): (Vec<(u64, u64)>, Vec<u32>) = if p == 2 {
            two_power_component(k)
        } else {
            let g = primitive_root(p, k)?;
            let order = m / p * (p - 1);
            let mut logs = vec![NO_LOG; m as usize];
            let mut x = 1u64;
            for j in 0..order {
                logs[x as usize] = j as u32;
                x = mul_mod(x, g, m);
            }
            (vec![(g, order)], logs)
        };
        for &(g, order) in &gens {
            generators.push(Generator {
                residue: crt_embed(g, m, q.value()),
                order,
            });
        }
        components.push(Component {
            prime: p,
            exp: k,
            modulus: m,
            first_gen,
            gen_count: gens.len(),
            logs,
        });
    }
    let root_order = generators.iter().fold(1, |acc, g| lcm(acc, g.order));
    let roots = (0..root_order)
        .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / root_order as f64))
        .collect();
    Ok(Arc::new(DirichletGroup {
        modulus: q.clone(),
        components,
        generators,
        root_order,
        roots,
    }))
}

/// Generators and log table for `(Z/2^k)*`.
fn two_power_component(k: u32) -> (Vec<(u64, u64)>, Vec<u32>) {
    let m = 1u64 << k;
    match k {
        1 => (vec![], vec![NO_LOG, 0]),
        2 => (vec![(3, 2)], vec![NO_LOG, 0, NO_LOG, 1]),
        _ => {
            let order5 = m / 4;
            let mut logs = vec![NO_LOG; 2 * m as usize];
            let mut x = 1u64;
            for b in 0..order5 {
                let neg = (m - x) as usize;
                logs[2 * x as usize] = 0;
                logs[2 * x as usize + 1] = b as u32;
                logs[2 * neg] = 1;
                logs[2 * neg + 1] = b as u32;
                x = x * 5 % m;
            }
            (vec![(m - 1, 2), (5, order5)], logs)
        }
    }
}

/// A Dirichlet character, stored as exponents over the group generators.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<DirichletGroup>,
    exponents: Vec<u64>,
    conductor: FactoredInt,
    parity: Parity,
    table: OnceLock<Arc<[Complex64]>>,
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletCharacter")
            .field("modulus", &self.group.q())
            .field("exponents", &self.exponents)
            .field("conductor", &self.conductor.value())
            .field("parity", &self.parity)
            .finish()
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.q() == other.group.q() && self.exponents == other.exponents
    }
}

impl DirichletCharacter {
    /// Character with the given exponents (reduced mod the generator orders).
    pub fn new(group: Arc<DirichletGroup>, exponents: &[u64]) -> Result<Self> {
        if exponents.len() != group.generators.len() {
            return Err(Error::Invalid(format!(
                "expected {} exponents, got {}",
                group.generators.len(),
                exponents.len()
            )));
        }
        let exponents: Vec<u64> = exponents
            .iter()
            .zip(&group.generators)
            .map(|(&e, g)| e % g.order)
            .collect();
        let mut conductor = Vec::new();
        let mut odd = false;
        for c in &group.components {
            let local = &exponents[c.first_gen..c.first_gen + c.gen_count];
            let j = local_conductor_exp(c, local);
            if j > 0 {
                conductor.push((c.prime, j));
            }
            // χ(-1): -1 is g^{φ/2} for odd p, and the first generator for 2^k, k >= 2
            if c.gen_count > 0 {
                odd ^= local[0] % 2 == 1;
            }
        }
        let conductor = FactoredInt::from_factors(conductor)?;
        let parity = if odd { Parity::Odd } else { Parity::Even };
        Ok(Self {
            group,
            exponents,
            conductor,
            parity,
            table: OnceLock::new(),
        })
    }

    pub fn trivial(group: Arc<DirichletGroup>) -> Self {
        let n = group.generators.len();
        Self::new(group, &vec![0; n]).expect("trivial exponents are valid")
    }

    pub fn group(&self) -> &Arc<DirichletGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.q()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn conductor(&self) -> &FactoredInt {
        &self.conductor
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_even(&self) -> bool {
        self.parity == Parity::Even
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor.value() == self.group.q()
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Real-valued (order at most 2).
    pub fn is_real(&self) -> bool {
        self.exponents
            .iter()
            .zip(&self.group.generators)
            .all(|(&e, g)| (2 * e) % g.order == 0)
    }

    pub fn conj(&self) -> Self {
        let exps: Vec<u64> = self
            .exponents
            .iter()
            .zip(&self.group.generators)
            .map(|(&e, g)| (g.order - e) % g.order)
            .collect();
        Self {
            group: self.group.clone(),
            exponents: exps,
            conductor: self.conductor.clone(),
            parity: self.parity,
            table: OnceLock::new(),
        }
    }

    /// `χ(n)`; zero when `gcd(n, q) > 1`.
    pub fn value(&self, n: u64) -> Complex64 {
        if let Some(t) = self.table.get() {
            return t[(n % self.group.q()) as usize];
        }
        self.compute(n)
    }

    fn compute(&self, n: u64) -> Complex64 {
        let mut scratch = vec![0; self.exponents.len()];
        match self.group.phase(&self.exponents, n, &mut scratch) {
            Some(ph) => self.group.roots[ph as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// All values `χ(0), …, χ(q-1)`, computed once and cached.
    pub fn values(&self) -> &[Complex64] {
        self.table.get_or_init(|| {
            let q = self.group.q();
            let mut scratch = vec![0; self.exponents.len()];
            (0..q)
                .map(|n| match self.group.phase(&self.exponents, n, &mut scratch) {
                    Some(ph) => self.group.roots[ph as usize],
                    None => Complex64::new(0.0, 0.0),
                })
                .collect()
        })
    }
}

/// Exponent `j` of the local conductor `p^j`.
fn local_conductor_exp(c: &Component, local: &[u64]) -> u32 {
    let (p, k) = (c.prime, c.exp);
    if p != 2 {
        let e = local[0];
        if e == 0 {
            return 0;
        }
        return k.saturating_sub(valuation(e, p)).max(1);
    }
    match k {
        1 => 0,
        2 => {
            if local[0] == 0 {
                0
            } else {
                2
            }
        }
        _ => {
            let (a, b) = (local[0], local[1]);
            if b == 0 {
                if a == 0 {
                    0
                } else {
                    2
                }
            } else {
                k.saturating_sub(valuation(b, 2)).max(3)
            }
        }
    }
}

/// Local exponent vectors of a component, optionally only the primitive ones.
fn local_choices(group: &DirichletGroup, c: &Component, primitive_only: bool) -> Vec<Vec<u64>> {
    let gens = &group.generators[c.first_gen..c.first_gen + c.gen_count];
    let mut out: Vec<Vec<u64>> = vec![vec![]];
    for g in gens {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..g.order).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    if primitive_only {
        out.retain(|v| local_conductor_exp(c, v) == c.exp);
    }
    out
}

/// Characters of the group, filtered by parity and primitivity. The order is
/// the lexicographic order of the exponent vectors.
pub fn enumerate_characters(
    group: &Arc<DirichletGroup>,
    even_only: bool,
    primitive_only: bool,
) -> Vec<DirichletCharacter> {
    let mut vectors: Vec<Vec<u64>> = vec![vec![]];
    for c in &group.components {
        let choices = local_choices(group, c, primitive_only);
        vectors = vectors
            .into_iter()
            .flat_map(|v| {
                choices.iter().map(move |w| {
                    let mut x = v.clone();
                    x.extend_from_slice(w);
                    x
                })
            })
            .collect();
    }
    vectors
        .into_iter()
        .map(|v| DirichletCharacter::new(group.clone(), &v).expect("exponents sized by construction"))
        .filter(|chi| !even_only || chi.is_even())
        .collect()
}

/// `χ(n)` for any integer `n`.
pub fn char_value(chi: &DirichletCharacter, n: i64) -> Complex64 {
    let q = chi.modulus() as i64;
    chi.value(n.rem_euclid(q) as u64)
}

/// `τ(χ) = Σ_{a mod q} χ(a) e(a/q)`.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus();
    let vals = chi.values();
    (0..q)
        .filter(|&a| vals[a as usize] != Complex64::new(0.0, 0.0))
        .map(|a| vals[a as usize] * Complex64::from_polar(1.0, TAU * a as f64 / q as f64))
        .sum()
}

/// `ε(χ) = τ(χ)/√q` for even primitive `χ`.
pub fn root_number(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() || !chi.is_even() {
        return Err(Error::Domain(format!(
            "root number needs an even primitive character, got {chi:?}"
        )));
    }
    Ok(gauss_sum(chi) / (chi.modulus() as f64).sqrt())
}

/// An exact value in `½ℤ`, stored as twice the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfInteger(pub i64);

impl HalfInteger {
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn check_coprime(q: u64, m: u64, n: u64) -> Result<()> {
    let g = gcd(m * n, q);
    if g != 1 {
        return Err(Error::NotCoprime(m * n, q, g));
    }
    Ok(())
}

/// `Σ_{χ even primitive mod q} χ(m) χ̄(n)` by enumeration.
pub fn orthogonality_sum(q: &FactoredInt, m: u64, n: u64) -> Result<Complex64> {
    check_coprime(q.value(), m, n)?;
    let group = build_group(q)?;
    Ok(enumerate_characters(&group, true, true)
        .iter()
        .map(|chi| chi.value(m) * chi.value(n).conj())
        .sum())
}

/// The divisor-sum evaluation
/// `½(Σ_{d | q, d | m-n} φ(d)μ(q/d) + Σ_{d | q, d | m+n} φ(d)μ(q/d))`.
pub fn orthogonality_formula(q: &FactoredInt, m: u64, n: u64) -> Result<HalfInteger> {
    check_coprime(q.value(), m, n)?;
    let diff = m as i128 - n as i128;
    let sum = m as i128 + n as i128;
    let mut twice = 0i64;
    for d in q.divisors() {
        let cofactor = factorize(q.value() / d)?;
        let mu = moebius(&cofactor) as i64;
        if mu == 0 {
            continue;
        }
        let phi = euler_phi(&factorize(d)?) as i64;
        if diff % d as i128 == 0 {
            twice += phi * mu;
        }
        if sum % d as i128 == 0 {
            twice += phi * mu;
        }
    }
    Ok(HalfInteger(twice))
}

/// Number of even primitive characters mod `q`: the formula at `m = n = 1`.
pub fn even_primitive_count(q: &FactoredInt) -> u64 {
    orthogonality_formula(q, 1, 1).map(|h| (h.0 / 2) as u64).unwrap_or(0)
}
