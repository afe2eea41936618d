//! Dense univariate polynomials over `Z/p^sZ`.
//!
//! Coefficients are stored in ascending degree order as centered residues,
//! with trailing zeros trimmed, so the zero polynomial has no coefficients.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::zmod::{Modulus, ZmodElem};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<i128>,
    modulus: Modulus,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, reducing each one.
    pub fn new(coeffs: Vec<i128>, modulus: Modulus) -> Self {
        let mut coeffs: Vec<i128> = coeffs.into_iter().map(|c| modulus.reduce(c)).collect();
        trim(&mut coeffs);
        Self { coeffs, modulus }
    }

    pub fn zero(modulus: Modulus) -> Self {
        Self {
            coeffs: Vec::new(),
            modulus,
        }
    }

    pub fn constant(c: i128, modulus: Modulus) -> Self {
        Self::new(vec![c], modulus)
    }

    pub fn one(modulus: Modulus) -> Self {
        Self::constant(1, modulus)
    }

    /// The monomial `x`.
    pub fn x(modulus: Modulus) -> Self {
        Self::monomial(1, modulus)
    }

    pub fn monomial(deg: usize, modulus: Modulus) -> Self {
        let mut c = vec![0; deg + 1];
        c[deg] = 1;
        Self::new(c, modulus)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> i128 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeff_elem(&self, i: usize) -> ZmodElem {
        self.modulus.elem(self.coeff(i))
    }

    /// Coefficient vector padded (or truncated) to `len` entries.
    pub fn to_vec(&self, len: usize) -> Vec<i128> {
        (0..len).map(|i| self.coeff(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> i128 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    fn same(&self, other: &Self) -> Result<Modulus> {
        if self.modulus == other.modulus {
            Ok(self.modulus)
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let m = self.same(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        Ok(Self::new(
            (0..len).map(|i| self.coeff(i) + other.coeff(i)).collect(),
            m,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let m = self.same(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        Ok(Self::new(
            (0..len).map(|i| self.coeff(i) - other.coeff(i)).collect(),
            m,
        ))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect(), self.modulus)
    }

    pub fn scale(&self, c: i128) -> Self {
        let m = self.modulus;
        Self::new(self.coeffs.iter().map(|&a| m.mul(a, c)).collect(), m)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let m = self.same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(m));
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = m.add(out[i + j], m.mul(a, b));
            }
        }
        Ok(Self::new(out, m))
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let m = self.same(divisor)?;
        let dd = match divisor.degree() {
            Some(d) if divisor.is_monic() => d,
            _ => return Err(Error::NonMonicDivisor),
        };
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(m), self.clone()));
        }
        let mut quot = vec![0i128; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = rem[top];
            if c == 0 {
                continue;
            }
            quot[top - dd] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let idx = top - dd + j;
                rem[idx] = m.sub(rem[idx], m.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot, m), Self::new(rem, m)))
    }

    /// Remainder modulo a monic polynomial of positive degree.
    pub fn rem(&self, f: &Self) -> Result<Self> {
        if f.degree().unwrap_or(0) == 0 && f.is_monic() {
            // division by the constant 1 leaves nothing
            return self.same(f).map(Self::zero);
        }
        self.div_rem(f).map(|(_, r)| r)
    }

    pub fn mul_mod(&self, other: &Self, f: &Self) -> Result<Self> {
        self.mul(other)?.rem(f)
    }

    /// `self^exp mod f` by square-and-multiply.
    pub fn pow_mod(&self, exp: &BigUint, f: &Self) -> Result<Self> {
        let mut acc = Self::one(self.modulus).rem(f)?;
        let base = self.rem(f)?;
        for i in (0..exp.bits()).rev() {
            acc = acc.mul_mod(&acc, f)?;
            if exp.bit(i) {
                acc = acc.mul_mod(&base, f)?;
            }
        }
        Ok(acc)
    }

    /// Evaluates at an integer point.
    pub fn eval(&self, x: i128) -> i128 {
        let m = self.modulus;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| m.add(m.mul(acc, x), c))
    }

    /// `self(h) mod f` by Horner's rule.
    pub fn compose_mod(&self, h: &Self, f: &Self) -> Result<Self> {
        self.same(h)?;
        let mut acc = Self::zero(self.modulus);
        for &c in self.coeffs.iter().rev() {
            acc = acc
                .mul_mod(h, f)?
                .add(&Self::constant(c, self.modulus))?;
        }
        acc.rem(f)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let m = self.modulus;
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| m.mul(c, i as i128))
                .collect(),
            m,
        )
    }

    /// Coefficient-wise reduction into `(-p/2, p/2]`, landing in `F_p[x]`.
    pub fn reduce_mod_p(&self) -> Self {
        let r = self.modulus.residue();
        Self::new(self.coeffs.clone(), r)
    }

    /// Reinterprets the (centered) coefficients over another modulus. Going
    /// from `p` to `p^s` this is the trivial lift.
    pub fn with_modulus(&self, modulus: Modulus) -> Self {
        Self::new(self.coeffs.clone(), modulus)
    }

    fn require_field(&self) -> Result<()> {
        if self.modulus.s() == 1 {
            Ok(())
        } else {
            Err(Error::ParamMismatch(
                "operation requires coefficients in a prime field".into(),
            ))
        }
    }

    /// Scales a nonzero polynomial over `F_p` to be monic.
    pub fn make_monic(&self) -> Result<Self> {
        self.require_field()?;
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = self.modulus.inv(self.leading())?;
        Ok(self.scale(inv))
    }

    /// Monic gcd over `F_p`; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        self.require_field()?;
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let bm = b.make_monic()?;
            let r = a.rem(&bm)?;
            a = bm;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.make_monic()
        }
    }

    /// Rabin's test: a monic `f̄` of degree `n` is irreducible over `F_p` iff
    /// `x^(p^n) = x mod f̄` and `gcd(x^(p^(n/q)) - x, f̄) = 1` for each prime
    /// `q | n`.
    pub fn is_irreducible_mod_p(&self) -> bool {
        let fbar = self.reduce_mod_p();
        let n = match fbar.degree() {
            Some(n) if n >= 1 && fbar.is_monic() => n,
            _ => return false,
        };
        if n == 1 {
            return true;
        }
        let r = fbar.modulus;
        let p = BigUint::from(r.p());
        let x = Self::x(r);
        // frob[i] = x^(p^i) mod f̄
        let mut frob = Vec::with_capacity(n + 1);
        frob.push(x.rem(&fbar).expect("monic"));
        for i in 0..n {
            let next = frob[i].pow_mod(&p, &fbar).expect("monic");
            frob.push(next);
        }
        if frob[n] != frob[0] {
            return false;
        }
        prime_factors(n).into_iter().all(|q| {
            let h = frob[n / q].sub(&frob[0]).expect("same modulus");
            h.gcd(&fbar).map(|g| g.degree() == Some(0)).unwrap_or(false)
        })
    }

    /// Draws a monic degree-`n` polynomial over `Z/p^sZ` with uniform
    /// non-leading coefficients, rejecting until it is irreducible mod `p`.
    pub fn random_monic_irreducible<R: Rng + ?Sized>(
        modulus: Modulus,
        n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        loop {
            let mut c: Vec<i128> = (0..n)
                .map(|_| rng.gen_range(0..modulus.value()))
                .collect();
            c.push(1);
            let f = Self::new(c, modulus);
            if f.is_irreducible_mod_p() {
                return Ok(f);
            }
        }
    }

    /// Parses the comma-separated ascending coefficient format.
    pub fn parse(text: &str, modulus: Modulus) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let coeffs = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i128>()
                    .map_err(|e| Error::Parse(format!("bad coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs, modulus))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn trim(c: &mut Vec<i128>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

pub(crate) fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
