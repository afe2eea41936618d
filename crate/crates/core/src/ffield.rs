//! Finite fields `F_p[x]/(f̄)`, root finding of a defining polynomial in
//! another field, and explicit isomorphisms between two presentations of
//! `F_{p^n}`.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::ModMatrix;
use crate::poly::Poly;
use crate::zmod::Modulus;

/// `F_p[x]/(f̄)` with `f̄` monic and irreducible over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    fbar: Poly,
    n: usize,
}

/// An element of a [`FieldCtx`], represented by a polynomial of degree `< n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem(Poly);

impl FieldElem {
    pub fn rep(&self) -> &Poly {
        &self.0
    }

    pub fn into_rep(self) -> Poly {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl FieldCtx {
    /// Accepts any modulus `p^s`; the polynomial is reduced mod `p` first.
    pub fn new(f: &Poly) -> Result<Self> {
        let fbar = f.reduce_mod_p();
        let n = match fbar.degree() {
            Some(n) if n >= 1 && fbar.is_monic() => n,
            _ => return Err(Error::NonMonicDivisor),
        };
        if !fbar.is_irreducible_mod_p() {
            return Err(Error::NotIrreducible);
        }
        Ok(Self { fbar, n })
    }

    pub fn modulus(&self) -> Modulus {
        self.fbar.modulus()
    }

    pub fn p(&self) -> u64 {
        self.modulus().p()
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn defining_poly(&self) -> &Poly {
        &self.fbar
    }

    /// Field order `p^n`.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.p()).pow(self.n as u32)
    }

    /// Reduces an arbitrary polynomial over `F_p` into the field.
    pub fn elem(&self, rep: &Poly) -> Result<FieldElem> {
        if rep.modulus() != self.modulus() {
            return Err(Error::CtxMismatch);
        }
        Ok(FieldElem(rep.rem(&self.fbar)?))
    }

    pub fn from_coeffs(&self, coeffs: &[i128]) -> FieldElem {
        FieldElem(
            Poly::new(coeffs.to_vec(), self.modulus())
                .rem(&self.fbar)
                .expect("monic"),
        )
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(Poly::zero(self.modulus()))
    }

    pub fn one(&self) -> FieldElem {
        self.from_coeffs(&[1])
    }

    /// The class of the indeterminate.
    pub fn generator(&self) -> FieldElem {
        self.from_coeffs(&[0, 1])
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        let p = self.p() as i128;
        let c: Vec<i128> = (0..self.n).map(|_| rng.gen_range(0..p)).collect();
        self.from_coeffs(&c)
    }

    fn check(&self, a: &FieldElem) -> Result<()> {
        if a.0.modulus() == self.modulus() && a.0.degree().is_none_or(|d| d < self.n) {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElem(a.0.add(&b.0)?))
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElem(a.0.sub(&b.0)?))
    }

    pub fn neg(&self, a: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        Ok(FieldElem(a.0.neg()))
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElem(a.0.mul_mod(&b.0, &self.fbar)?))
    }

    pub fn pow(&self, a: &FieldElem, exp: &BigUint) -> Result<FieldElem> {
        self.check(a)?;
        Ok(FieldElem(a.0.pow_mod(exp, &self.fbar)?))
    }

    /// Inverse via `a^(q-2)`.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let exp = self.order() - BigUint::from(2u32);
        self.pow(a, &exp)
    }

    /// Evaluates a polynomial over `F_p` at a field element.
    pub fn eval(&self, g: &Poly, a: &FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        if g.modulus().p() != self.p() {
            return Err(Error::ModulusMismatch);
        }
        Ok(FieldElem(g.reduce_mod_p().compose_mod(&a.0, &self.fbar)?))
    }
}

/// Polynomials with coefficients in a [`FieldCtx`], used for root finding.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ExtPoly(Vec<FieldElem>);

impl ExtPoly {
    fn trimmed(mut c: Vec<FieldElem>) -> Self {
        while c.last().is_some_and(FieldElem::is_zero) {
            c.pop();
        }
        Self(c)
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn coeff(&self, k: &FieldCtx, i: usize) -> FieldElem {
        self.0.get(i).cloned().unwrap_or_else(|| k.zero())
    }

    fn lift(k: &FieldCtx, g: &Poly) -> Self {
        Self::trimmed(
            g.reduce_mod_p()
                .coeffs()
                .iter()
                .map(|&c| k.from_coeffs(&[c]))
                .collect(),
        )
    }

    fn linear(k: &FieldCtx, c0: FieldElem) -> Self {
        Self(vec![c0, k.one()])
    }

    fn add(&self, k: &FieldCtx, o: &Self) -> Result<Self> {
        let len = self.0.len().max(o.0.len());
        Ok(Self::trimmed(
            (0..len)
                .map(|i| k.add(&self.coeff(k, i), &o.coeff(k, i)))
                .collect::<Result<_>>()?,
        ))
    }

    fn sub(&self, k: &FieldCtx, o: &Self) -> Result<Self> {
        let len = self.0.len().max(o.0.len());
        Ok(Self::trimmed(
            (0..len)
                .map(|i| k.sub(&self.coeff(k, i), &o.coeff(k, i)))
                .collect::<Result<_>>()?,
        ))
    }

    fn mul(&self, k: &FieldCtx, o: &Self) -> Result<Self> {
        if self.0.is_empty() || o.0.is_empty() {
            return Ok(Self(Vec::new()));
        }
        let mut out = vec![k.zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = k.add(&out[i + j], &k.mul(a, b)?)?;
            }
        }
        Ok(Self::trimmed(out))
    }

    fn monic(&self, k: &FieldCtx) -> Result<Self> {
        let lead = self.0.last().ok_or(Error::DivisionByZero)?;
        let inv = k.inv(lead)?;
        Ok(Self(
            self.0.iter().map(|c| k.mul(c, &inv)).collect::<Result<_>>()?,
        ))
    }

    /// Division by a nonzero divisor (normalized internally).
    fn div_rem(&self, k: &FieldCtx, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = k.inv(&d.0[dd])?;
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return Ok((Self(Vec::new()), self.clone()));
        }
        let mut quot = vec![k.zero(); rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            if rem[top].is_zero() {
                continue;
            }
            let c = k.mul(&rem[top], &lead_inv)?;
            for (j, dc) in d.0.iter().enumerate() {
                let idx = top - dd + j;
                rem[idx] = k.sub(&rem[idx], &k.mul(&c, dc)?)?;
            }
            quot[top - dd] = c;
        }
        rem.truncate(dd);
        Ok((Self::trimmed(quot), Self::trimmed(rem)))
    }

    fn rem(&self, k: &FieldCtx, d: &Self) -> Result<Self> {
        self.div_rem(k, d).map(|(_, r)| r)
    }

    fn gcd(&self, k: &FieldCtx, o: &Self) -> Result<Self> {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.0.is_empty() {
            let r = a.rem(k, &b)?;
            a = b;
            b = r;
        }
        if a.0.is_empty() {
            Ok(a)
        } else {
            a.monic(k)
        }
    }

    fn pow_mod(&self, k: &FieldCtx, exp: &BigUint, m: &Self) -> Result<Self> {
        let base = self.rem(k, m)?;
        let mut acc = Self(vec![k.one()]).rem(k, m)?;
        for i in (0..exp.bits()).rev() {
            acc = acc.mul(k, &acc)?.rem(k, m)?;
            if exp.bit(i) {
                acc = acc.mul(k, &base)?.rem(k, m)?;
            }
        }
        Ok(acc)
    }
}

/// Finds a root in `field` of a polynomial `g` over `F_p` whose degree equals
/// the field degree. Uses equal-degree splitting: `gcd(h, (t+δ)^((q-1)/2) - 1)`
/// for odd `p`, and the absolute trace `gcd(h, Tr(δt))` for `p = 2`.
pub fn find_root<R: Rng + ?Sized>(g: &Poly, field: &FieldCtx, rng: &mut R) -> Result<FieldElem> {
    let k = field;
    let gbar = g.reduce_mod_p();
    if gbar.modulus() != k.modulus() || gbar.degree() != Some(k.degree()) || !gbar.is_monic() {
        return Err(Error::NoRoot);
    }
    let gt = ExtPoly::lift(k, &gbar);
    let t = ExtPoly(vec![k.zero(), k.one()]);
    // t^q mod g via n Frobenius steps
    let p = BigUint::from(k.p());
    let mut tq = t.rem(k, &gt)?;
    for _ in 0..k.degree() {
        tq = tq.pow_mod(k, &p, &gt)?;
    }
    let mut h = gt.gcd(k, &tq.sub(k, &t)?)?;
    if h.degree().unwrap_or(0) == 0 {
        return Err(Error::NoRoot);
    }
    let half = (k.order() - BigUint::one()) >> 1u32;
    while h.degree() != Some(1) {
        let delta = k.random(rng);
        let splitter = if k.p() == 2 {
            // Tr(δt) = Σ_{i<n} (δt)^(2^i) mod h
            let mut term = ExtPoly::trimmed(vec![k.zero(), delta]).rem(k, &h)?;
            let mut acc = term.clone();
            for _ in 1..k.degree() {
                term = term.mul(k, &term)?.rem(k, &h)?;
                acc = acc.add(k, &term)?;
            }
            acc
        } else {
            ExtPoly::linear(k, delta)
                .pow_mod(k, &half, &h)?
                .sub(k, &ExtPoly(vec![k.one()]))?
        };
        let d = h.gcd(k, &splitter)?;
        let dd = d.degree().unwrap_or(0);
        let hd = h.degree().unwrap_or(0);
        if dd == 0 || dd == hd {
            continue;
        }
        h = if 2 * dd <= hd {
            d
        } else {
            h.div_rem(k, &d)?.0.monic(k)?
        };
    }
    let root = k.neg(&h.0[0])?;
    if !k.eval(&gbar, &root)?.is_zero() {
        return Err(Error::InvariantBreach("find_root produced a non-root".into()));
    }
    Ok(root)
}

/// Coefficient matrix whose row `i` is `image^i` in `dst`, `i = 0..n-1`.
pub(crate) fn power_matrix(dst: &FieldCtx, image: &FieldElem) -> Result<ModMatrix> {
    let n = dst.degree();
    let mut rows = Vec::with_capacity(n);
    let mut cur = dst.one();
    for _ in 0..n {
        rows.push(cur.rep().to_vec(n));
        cur = dst.mul(&cur, image)?;
    }
    ModMatrix::from_rows(rows, dst.modulus())
}

/// An explicit isomorphism `F_p[x]/(f̄) → F_p[y]/(F̄)` given by the image
/// `A(y)` of `x`, with forward and backward coefficient matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldIsomorphism {
    src: FieldCtx,
    dst: FieldCtx,
    image_of_x: FieldElem,
    preimage_of_y: FieldElem,
    forward: ModMatrix,
    backward: ModMatrix,
}

impl FieldIsomorphism {
    /// Builds the isomorphism determined by `x ↦ image`, which must be a root
    /// of the source polynomial in `dst`.
    pub fn from_image(src: FieldCtx, dst: FieldCtx, image: FieldElem) -> Result<Self> {
        if src.p() != dst.p() {
            return Err(Error::ParamMismatch("characteristics differ".into()));
        }
        if src.degree() != dst.degree() {
            return Err(Error::DegreeMismatch {
                expected: src.degree(),
                found: dst.degree(),
            });
        }
        if !dst.eval(src.defining_poly(), &image)?.is_zero() {
            return Err(Error::NoRoot);
        }
        let forward = power_matrix(&dst, &image)?;
        let backward = forward.inverse()?;
        let n = src.degree();
        let y = dst.generator();
        let pre = backward.left_mul_vec(&y.rep().to_vec(n))?;
        let preimage_of_y = src.from_coeffs(&pre);
        Ok(Self {
            src,
            dst,
            image_of_x: image,
            preimage_of_y,
            forward,
            backward,
        })
    }

    pub fn src(&self) -> &FieldCtx {
        &self.src
    }

    pub fn dst(&self) -> &FieldCtx {
        &self.dst
    }

    /// `A(y)`, the image of `x`.
    pub fn image_of_x(&self) -> &FieldElem {
        &self.image_of_x
    }

    /// `B(x)`, the preimage of `y`.
    pub fn preimage_of_y(&self) -> &FieldElem {
        &self.preimage_of_y
    }

    pub fn forward_matrix(&self) -> &ModMatrix {
        &self.forward
    }

    pub fn backward_matrix(&self) -> &ModMatrix {
        &self.backward
    }

    pub fn apply(&self, a: &FieldElem) -> Result<FieldElem> {
        self.src.check(a)?;
        let v = self.forward.left_mul_vec(&a.rep().to_vec(self.src.degree()))?;
        Ok(self.dst.from_coeffs(&v))
    }

    pub fn apply_inverse(&self, a: &FieldElem) -> Result<FieldElem> {
        self.dst.check(a)?;
        let v = self.backward.left_mul_vec(&a.rep().to_vec(self.dst.degree()))?;
        Ok(self.src.from_coeffs(&v))
    }
}

/// Builds an isomorphism between `F_p[x]/(f̄)` and `F_p[y]/(F̄)`: a root of
/// `f̄` in the target field fixes the image of `x`, and the inverse comes from
/// inverting the power matrix.
pub fn build_field_iso<R: Rng + ?Sized>(
    fbar: &Poly,
    big_fbar: &Poly,
    rng: &mut R,
) -> Result<FieldIsomorphism> {
    if fbar.modulus().p() != big_fbar.modulus().p() {
        return Err(Error::ParamMismatch("characteristics differ".into()));
    }
    if fbar.degree() != big_fbar.degree() {
        return Err(Error::DegreeMismatch {
            expected: fbar.degree().unwrap_or(0),
            found: big_fbar.degree().unwrap_or(0),
        });
    }
    let src = FieldCtx::new(fbar)?;
    let dst = FieldCtx::new(big_fbar)?;
    let image = find_root(src.defining_poly(), &dst, rng)?;
    FieldIsomorphism::from_image(src, dst, image)
}
