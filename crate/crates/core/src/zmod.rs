//! Arithmetic in `Z/p^sZ` with centered representatives.
//!
//! Every residue is stored as the unique integer in `(-m/2, m/2]` congruent
//! to it, where `m = p^s`. For odd `m` the interval is symmetric; for even `m`
//! the value `m/2` is included and `-m/2` is not.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported `p^s`. Products of two centered residues then fit in
/// an `i128` with room to spare.
pub const MAX_MODULUS: i128 = 1 << 62;

/// Maps `x` to its centered representative modulo `m` (`m >= 1`).
pub fn centered(x: i128, m: i128) -> i128 {
    debug_assert!(m >= 1);
    let r = x.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

/// Extended Euclid: returns `(g, u, v)` with `u*a + v*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_u, mut u) = (1i128, 0i128);
    let (mut old_v, mut v) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_u, u) = (u, old_u - q * u);
        (old_v, v) = (v, old_v - q * v);
    }
    if old_r < 0 {
        (-old_r, -old_u, -old_v)
    } else {
        (old_r, old_u, old_v)
    }
}

/// Inverse of `a` modulo `m`, if it exists, as a centered representative.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (g, u, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| centered(u, m))
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for the full `u64` range: trial division by
/// small primes followed by Miller-Rabin with the first twelve prime bases,
/// which has no pseudoprimes below 2^64.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The modulus `p^s` of a Galois ring's coefficient ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: u64,
    s: u32,
    m: i128,
}

impl Modulus {
    pub fn new(p: u64, s: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s == 0 {
            return Err(Error::ZeroExponent);
        }
        let mut m: i128 = 1;
        for _ in 0..s {
            m = m
                .checked_mul(p as i128)
                .filter(|&v| v <= MAX_MODULUS)
                .ok_or_else(|| Error::ModulusTooLarge(format!("{p}^{s}")))?;
        }
        Ok(Self { p, s, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// `p^s` as an integer.
    pub fn value(&self) -> i128 {
        self.m
    }

    /// The residue field modulus `(p, 1)`.
    pub fn residue(&self) -> Modulus {
        Modulus {
            p: self.p,
            s: 1,
            m: self.p as i128,
        }
    }

    /// `p^e` for `e <= s`.
    pub fn prime_power(&self, e: u32) -> i128 {
        debug_assert!(e <= self.s);
        (self.p as i128).pow(e)
    }

    pub fn reduce(&self, x: i128) -> i128 {
        centered(x, self.m)
    }

    pub fn elem(&self, x: i128) -> ZmodElem {
        ZmodElem {
            value: self.reduce(x),
            modulus: *self,
        }
    }

    pub fn add(&self, a: i128, b: i128) -> i128 {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: i128, b: i128) -> i128 {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: i128, b: i128) -> i128 {
        self.reduce(a * b)
    }

    /// Unit inverse of a raw residue.
    pub fn inv(&self, a: i128) -> Result<i128> {
        inv_mod(a, self.m).ok_or(Error::NotAUnit)
    }

    /// A residue is a unit iff `p` does not divide it.
    pub fn is_unit(&self, a: i128) -> bool {
        a.rem_euclid(self.p as i128) != 0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.s)
        }
    }
}

/// A residue modulo `p^s` in centered form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZmodElem {
    value: i128,
    modulus: Modulus,
}

impl ZmodElem {
    /// Centered reduction of an arbitrary integer.
    pub fn centered_reduce(x: i128, modulus: Modulus) -> Self {
        modulus.elem(x)
    }

    pub fn value(&self) -> i128 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    fn check(&self, other: &Self) -> Result<Modulus> {
        if self.modulus == other.modulus {
            Ok(self.modulus)
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let m = self.check(other)?;
        Ok(m.elem(self.value + other.value))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let m = self.check(other)?;
        Ok(m.elem(self.value - other.value))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let m = self.check(other)?;
        Ok(m.elem(self.value * other.value))
    }

    pub fn neg(&self) -> Self {
        self.modulus.elem(-self.value)
    }

    pub fn inv(&self) -> Result<Self> {
        let v = self.modulus.inv(self.value)?;
        Ok(self.modulus.elem(v))
    }

    pub fn is_unit(&self) -> bool {
        self.modulus.is_unit(self.value)
    }
}

impl fmt::Display for ZmodElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
