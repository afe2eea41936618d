//! Galois rings `GR(p^s, n) = (Z/p^sZ)[x]/(f)` with `f` monic and irreducible
//! mod `p`, Hensel lifting of simple roots, and ring isomorphisms obtained by
//! lifting a residue-field isomorphism.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ffield::{build_field_iso, FieldCtx, FieldElem, FieldIsomorphism};
use crate::matrix::ModMatrix;
use crate::poly::Poly;
use crate::zmod::Modulus;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingCtx {
    f: Poly,
    n: usize,
    residue: FieldCtx,
}

/// Element of a [`RingCtx`]: a polynomial of degree `< n` with centered
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElem(Poly);

impl RingElem {
    pub fn rep(&self) -> &Poly {
        &self.0
    }

    pub fn into_rep(self) -> Poly {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Largest absolute coefficient.
    pub fn sup_norm(&self) -> i128 {
        self.0.coeffs().iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl RingCtx {
    pub fn new(f: &Poly) -> Result<Self> {
        let n = match f.degree() {
            Some(n) if n >= 1 && f.is_monic() => n,
            _ => return Err(Error::NonMonicDivisor),
        };
        let residue = FieldCtx::new(f)?;
        Ok(Self {
            f: f.clone(),
            n,
            residue,
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.f.modulus()
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn defining_poly(&self) -> &Poly {
        &self.f
    }

    /// The residue field `F_p[x]/(f̄)`.
    pub fn residue_field(&self) -> &FieldCtx {
        &self.residue
    }

    pub fn elem(&self, rep: &Poly) -> Result<RingElem> {
        if rep.modulus() != self.modulus() {
            return Err(Error::CtxMismatch);
        }
        Ok(RingElem(rep.rem(&self.f)?))
    }

    pub fn from_coeffs(&self, coeffs: &[i128]) -> RingElem {
        RingElem(
            Poly::new(coeffs.to_vec(), self.modulus())
                .rem(&self.f)
                .expect("monic"),
        )
    }

    pub fn zero(&self) -> RingElem {
        RingElem(Poly::zero(self.modulus()))
    }

    pub fn one(&self) -> RingElem {
        self.from_coeffs(&[1])
    }

    pub fn generator(&self) -> RingElem {
        self.from_coeffs(&[0, 1])
    }

    /// Uniform element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> RingElem {
        let m = self.modulus().value();
        let c: Vec<i128> = (0..self.n).map(|_| rng.gen_range(0..m)).collect();
        self.from_coeffs(&c)
    }

    /// Coefficient vector of length `n`.
    pub fn to_vec(&self, a: &RingElem) -> Vec<i128> {
        a.0.to_vec(self.n)
    }

    pub fn contains(&self, a: &RingElem) -> bool {
        a.0.modulus() == self.modulus() && a.0.degree().is_none_or(|d| d < self.n)
    }

    fn check(&self, a: &RingElem) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(RingElem(a.0.add(&b.0)?))
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(RingElem(a.0.sub(&b.0)?))
    }

    pub fn neg(&self, a: &RingElem) -> Result<RingElem> {
        self.check(a)?;
        Ok(RingElem(a.0.neg()))
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(RingElem(a.0.mul_mod(&b.0, &self.f)?))
    }

    /// Units are exactly the elements outside the maximal ideal `(p)`.
    pub fn is_unit(&self, a: &RingElem) -> bool {
        self.contains(a) && !a.0.reduce_mod_p().is_zero()
    }

    /// Inverse of a unit: invert in the residue field, then Newton-iterate
    /// `b ← b(2 - ab)`, which doubles the `p`-adic precision each step.
    pub fn inv(&self, a: &RingElem) -> Result<RingElem> {
        self.check(a)?;
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        let abar = self.reduce_elem(a)?;
        let binv = self.residue.inv(&abar)?;
        let mut b = self.lift(&binv);
        let one = self.one();
        let two = self.from_coeffs(&[2]);
        for _ in 0..=self.modulus().s() {
            let ab = self.mul(a, &b)?;
            if ab == one {
                return Ok(b);
            }
            b = self.mul(&b, &self.sub(&two, &ab)?)?;
        }
        Err(Error::InvariantBreach("Newton inversion did not converge".into()))
    }

    /// The reduction map `π` onto the residue field.
    pub fn reduce_elem(&self, a: &RingElem) -> Result<FieldElem> {
        self.check(a)?;
        self.residue.elem(&a.0.reduce_mod_p())
    }

    /// Trivial lift of a residue-field element: same centered coefficients.
    pub fn lift(&self, a: &FieldElem) -> RingElem {
        RingElem(a.rep().with_modulus(self.modulus()))
    }

    /// Evaluates `g` over `Z/p^sZ` at a ring element.
    pub fn eval(&self, g: &Poly, a: &RingElem) -> Result<RingElem> {
        self.check(a)?;
        if g.modulus() != self.modulus() {
            return Err(Error::ModulusMismatch);
        }
        Ok(RingElem(g.compose_mod(&a.0, &self.f)?))
    }

    /// Whether every coefficient of `a` is divisible by `p^e`.
    pub fn in_ideal(&self, a: &RingElem, e: u32) -> bool {
        let m = self.modulus();
        let pe = m.prime_power(e.min(m.s()));
        a.0.coeffs().iter().all(|c| c.rem_euclid(pe) == 0)
    }
}

/// Iterates `β_0, …, β_{s-1}` of a Hensel lift, together with the residuals
/// `g(β_i)`.
#[derive(Debug, Clone)]
pub struct LiftTrace {
    pub iterates: Vec<RingElem>,
    pub residuals: Vec<RingElem>,
}

impl LiftTrace {
    pub fn root(&self) -> &RingElem {
        self.iterates.last().expect("at least one iterate")
    }

    /// Number of Newton updates performed.
    pub fn updates(&self) -> usize {
        self.iterates.len() - 1
    }
}

/// Lifts a simple root of `ḡ` to the unique root of `g` above it.
pub fn hensel_lift(g: &Poly, alpha0: &RingElem, ctx: &RingCtx) -> Result<RingElem> {
    hensel_lift_traced(g, alpha0, ctx).map(|t| t.root().clone())
}

/// Runs `β_{i+1} = β_i - g'(β_i)^{-1} g(β_i)` for `i = 0, …, s-2`, checking
/// `g(β_i) ∈ (p^{i+1})` after every step.
pub fn hensel_lift_traced(g: &Poly, alpha0: &RingElem, ctx: &RingCtx) -> Result<LiftTrace> {
    let s = ctx.modulus().s();
    let dg = g.derivative();
    let mut beta = alpha0.clone();
    let mut residual = ctx.eval(g, &beta)?;
    if !ctx.in_ideal(&residual, 1) {
        return Err(Error::NotARootModP);
    }
    if !ctx.is_unit(&ctx.eval(&dg, &beta)?) {
        return Err(Error::NotASimpleRoot);
    }
    let mut trace = LiftTrace {
        iterates: vec![beta.clone()],
        residuals: vec![residual.clone()],
    };
    for i in 0..s.saturating_sub(1) {
        let slope_inv = ctx.inv(&ctx.eval(&dg, &beta)?)?;
        beta = ctx.sub(&beta, &ctx.mul(&slope_inv, &residual)?)?;
        residual = ctx.eval(g, &beta)?;
        if !ctx.in_ideal(&residual, i + 2) {
            return Err(Error::InvariantBreach(format!(
                "g(beta_{}) not in (p^{})",
                i + 1,
                i + 2
            )));
        }
        trace.iterates.push(beta.clone());
        trace.residuals.push(residual.clone());
    }
    if !residual.is_zero() {
        return Err(Error::InvariantBreach("lifted value is not a root".into()));
    }
    Ok(trace)
}

/// A ring isomorphism `X = (Z/p^sZ)[x]/(f) → Y = (Z/p^sZ)[y]/(F)` determined
/// by the image of `x`. Row `i` of the forward matrix `M` holds the
/// coefficients of `φ(x)^i`, so `A = aM`; the backward matrix is `N = M^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    src: RingCtx,
    dst: RingCtx,
    phi_x: RingElem,
    forward: ModMatrix,
    backward: ModMatrix,
}

impl Isomorphism {
    /// Validates `f(phi_x) = 0` in `dst` and derives both matrices.
    pub fn from_image(src: RingCtx, dst: RingCtx, phi_x: RingElem) -> Result<Self> {
        check_params(&src, &dst)?;
        dst.check(&phi_x)?;
        if !dst.eval(src.defining_poly(), &phi_x)?.is_zero() {
            return Err(Error::NoRoot);
        }
        let n = dst.degree();
        let mut rows = Vec::with_capacity(n);
        let mut cur = dst.one();
        for _ in 0..n {
            rows.push(dst.to_vec(&cur));
            cur = dst.mul(&cur, &phi_x)?;
        }
        let forward = ModMatrix::from_rows(rows, dst.modulus())?;
        let backward = forward.inverse()?;
        Ok(Self {
            src,
            dst,
            phi_x,
            forward,
            backward,
        })
    }

    pub fn identity(ctx: &RingCtx) -> Self {
        Self::from_image(ctx.clone(), ctx.clone(), ctx.generator()).expect("x is a root of f")
    }

    pub fn src(&self) -> &RingCtx {
        &self.src
    }

    pub fn dst(&self) -> &RingCtx {
        &self.dst
    }

    /// `φ(x)` in the target ring.
    pub fn image_of_x(&self) -> &RingElem {
        &self.phi_x
    }

    /// `M`: coefficient rows of `φ(x)^i`.
    pub fn forward_matrix(&self) -> &ModMatrix {
        &self.forward
    }

    /// `N = M^{-1}`.
    pub fn backward_matrix(&self) -> &ModMatrix {
        &self.backward
    }

    /// `A = aM`.
    pub fn apply(&self, a: &RingElem) -> Result<RingElem> {
        self.src.check(a)?;
        let v = self.forward.left_mul_vec(&self.src.to_vec(a))?;
        Ok(self.dst.from_coeffs(&v))
    }

    /// `a = AN`.
    pub fn apply_inverse(&self, a: &RingElem) -> Result<RingElem> {
        self.dst.check(a)?;
        let v = self.backward.left_mul_vec(&self.dst.to_vec(a))?;
        Ok(self.src.from_coeffs(&v))
    }

    /// `a(φ(x)) mod F`, the same map computed by substitution.
    pub fn apply_by_composition(&self, a: &RingElem) -> Result<RingElem> {
        self.src.check(a)?;
        self.dst.eval(a.rep(), &self.phi_x)
    }

    /// The induced isomorphism of residue fields.
    pub fn reduce(&self) -> Result<FieldIsomorphism> {
        let image = self.dst.reduce_elem(&self.phi_x)?;
        FieldIsomorphism::from_image(
            self.src.residue_field().clone(),
            self.dst.residue_field().clone(),
            image,
        )
    }
}

fn check_params(src: &RingCtx, dst: &RingCtx) -> Result<()> {
    if src.modulus() != dst.modulus() || src.degree() != dst.degree() {
        return Err(Error::ParamMismatch(format!(
            "GR({}, {}) vs GR({}, {})",
            src.modulus(),
            src.degree(),
            dst.modulus(),
            dst.degree()
        )));
    }
    Ok(())
}

/// Builds `φ: src → dst` by constructing a residue-field isomorphism, taking
/// the trivial lift of the image of `x` and Hensel-lifting it to a root of
/// `f` in `dst`.
pub fn build_ring_iso<R: Rng + ?Sized>(
    src: &RingCtx,
    dst: &RingCtx,
    rng: &mut R,
) -> Result<Isomorphism> {
    check_params(src, dst)?;
    let field_iso = build_field_iso(
        src.residue_field().defining_poly(),
        dst.residue_field().defining_poly(),
        rng,
    )?;
    let alpha = dst.lift(field_iso.image_of_x());
    let phi_x = hensel_lift(src.defining_poly(), &alpha, dst)?;
    Isomorphism::from_image(src.clone(), dst.clone(), phi_x)
}
