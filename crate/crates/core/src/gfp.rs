//! Arithmetic over GF(p) and exact binomial coefficients.
//!
//! Field elements are stored as fully reduced `u32` values, so every product
//! of two of them fits in a `u64` before reduction. Binomial coefficients
//! modulo `p` go through the base-`p` digit decomposition (Lucas), which
//! keeps arguments of size `p^2` and beyond cheap.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime characteristic, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeModulus(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.0 as u64) as u32
    }

    #[inline]
    pub fn reduce_signed(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.0 as u64 {
            (s - self.0 as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.0 as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse via the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32> {
        let a = a % self.0;
        if a == 0 {
            return Err(Error::ZeroInverse(self.0));
        }
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_signed(t0))
    }

    pub fn element(self, v: u64) -> Fp {
        Fp {
            value: self.reduce(v),
            modulus: self,
        }
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0 as u64
    }
}

/// Deterministic trial division; moduli are at most 32 bits.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut f = 3u64;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// An element of GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    modulus: PrimeModulus,
}

impl Fp {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        modulus.element(value)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp {
            value: self.modulus.add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp {
            value: self.modulus.sub(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp {
            value: self.modulus.mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}

pub fn inv_mod_p(a: Fp) -> Result<Fp> {
    Ok(Fp {
        value: a.modulus.inv(a.value)?,
        modulus: a.modulus,
    })
}

/// C(n, k) as an exact integer; zero outside `0 <= k <= n`.
pub fn binom_exact(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::default();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// C(n, k) mod p via Lucas' theorem.
pub fn binom_mod_p(n: u64, k: i64, p: PrimeModulus) -> Fp {
    Fp {
        value: lucas(n, k, p, |a, b| small_binom(a, b, p)),
        modulus: p,
    }
}

fn lucas(mut n: u64, k: i64, p: PrimeModulus, digit: impl Fn(u64, u64) -> u32) -> u32 {
    if k < 0 || k as u64 > n {
        return 0;
    }
    let mut k = k as u64;
    let base = p.get() as u64;
    let mut acc = 1 % p.get();
    while k > 0 {
        let (nd, kd) = (n % base, k % base);
        if kd > nd {
            return 0;
        }
        acc = p.mul(acc, digit(nd, kd));
        n /= base;
        k /= base;
    }
    acc
}

// 0 <= k <= n < p
fn small_binom(n: u64, k: u64, p: PrimeModulus) -> u32 {
    let k = k.min(n - k);
    let (mut num, mut den) = (1u32, 1u32);
    for i in 0..k {
        num = p.mul(num, p.reduce(n - i));
        den = p.mul(den, p.reduce(i + 1));
    }
    p.mul(num, p.inv(den).expect("digit denominators are units"))
}

/// Factorial tables for repeated Lucas evaluations at one modulus.
#[derive(Clone, Debug)]
pub struct LucasTable {
    p: PrimeModulus,
    fact: Vec<u32>,
    inv_fact: Vec<u32>,
}

impl LucasTable {
    /// Tables are only materialized for moduli below 2^20; larger moduli fall
    /// back to per-digit products.
    pub fn new(p: PrimeModulus) -> Self {
        let size = if p.get() < (1 << 20) { p.get() as usize } else { 0 };
        let mut fact = vec![1u32 % p.get(); size];
        for i in 1..size {
            fact[i] = p.mul(fact[i - 1], i as u32);
        }
        let mut inv_fact = vec![0u32; size];
        if size > 0 {
            inv_fact[size - 1] = p.inv(fact[size - 1]).expect("(p-1)! is a unit");
            for i in (1..size).rev() {
                inv_fact[i - 1] = p.mul(inv_fact[i], i as u32);
            }
        }
        LucasTable { p, fact, inv_fact }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn binom(&self, n: u64, k: i64) -> u32 {
        if self.fact.is_empty() {
            return lucas(n, k, self.p, |a, b| small_binom(a, b, self.p));
        }
        lucas(n, k, self.p, |a, b| {
            let (a, b) = (a as usize, b as usize);
            self.p
                .mul(self.fact[a], self.p.mul(self.inv_fact[b], self.inv_fact[a - b]))
        })
    }
}
