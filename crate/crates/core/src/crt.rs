//! Direct sums of Galois rings with coprime characteristics.
//!
//! For components `GR(p_i^{s_i}, n)` with distinct primes, coefficient-wise
//! Chinese remaindering gives a single monic `f` over `Z/mZ`,
//! `m = Π p_i^{s_i}`, and `(Z/mZ)[x]/(f)` is isomorphic to the product of
//! the components. Elements live in the combined ring and are split into
//! components on demand.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gring::{build_ring_iso, Isomorphism, RingCtx, RingElem};
use crate::poly::Poly;
use crate::zmod::{centered, inv_mod, MAX_MODULUS};

/// Polynomial over `Z/mZ` for a composite `m`, ascending centered
/// coefficients with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositePoly {
    coeffs: Vec<i128>,
    m: i128,
}

impl CompositePoly {
    pub fn new(coeffs: &[i128], m: i128) -> Self {
        let mut coeffs: Vec<i128> = coeffs.iter().map(|&c| centered(c, m)).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs, m }
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn modulus(&self) -> i128 {
        self.m
    }

    pub fn coeff(&self, i: usize) -> i128 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Reduction to a prime-power modulus dividing `m`.
    pub fn reduce_to(&self, ctx: &RingCtx) -> Poly {
        Poly::new(self.coeffs.clone(), ctx.modulus())
    }
}

impl fmt::Display for CompositePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Solves `x ≡ r_i (mod m_i)` for pairwise coprime moduli; result centered mod `Π m_i`.
fn crt_scalar(residues: &[(i128, i128)]) -> Result<(i128, i128)> {
    let mut x = 0i128;
    let mut m = 1i128;
    for &(r, mi) in residues {
        let inv = inv_mod(m.rem_euclid(mi), mi).ok_or(Error::ModuliNotCoprime)?;
        let next = m.checked_mul(mi).filter(|&v| v <= MAX_MODULUS).ok_or_else(|| {
            Error::ModulusTooLarge(format!("composite modulus exceeds 2^62 at factor {mi}"))
        })?;
        // x + m * ((r - x) * inv mod mi)
        let t = ((r - x).rem_euclid(mi) * inv).rem_euclid(mi);
        x = centered(x + m * t, next);
        m = next;
    }
    Ok((x, m))
}

fn check_coprime(moduli: &[i128]) -> Result<()> {
    for (i, &a) in moduli.iter().enumerate() {
        for &b in &moduli[i + 1..] {
            if crate::zmod::ext_gcd(a, b).0.abs() != 1 {
                return Err(Error::ModuliNotCoprime);
            }
        }
    }
    Ok(())
}

/// The unique monic `f` mod `m = Π p_i^{s_i}` with `f ≡ f_i` coefficient-wise.
pub fn crt_combine_polys(polys: &[Poly]) -> Result<CompositePoly> {
    let first = polys
        .first()
        .ok_or_else(|| Error::InvalidParameter("no components".into()))?;
    let n = first.degree().unwrap_or(0);
    check_coprime(&polys.iter().map(|f| f.modulus().value()).collect::<Vec<_>>())?;
    for f in polys {
        if !f.is_monic() {
            return Err(Error::NonMonicDivisor);
        }
        let d = f.degree().unwrap_or(0);
        if d != n {
            return Err(Error::DegreeMismatch { expected: n, found: d });
        }
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut m = 1;
    for i in 0..=n {
        let residues: Vec<(i128, i128)> = polys
            .iter()
            .map(|f| (f.coeff(i), f.modulus().value()))
            .collect();
        let (c, mm) = crt_scalar(&residues)?;
        coeffs.push(c);
        m = mm;
    }
    Ok(CompositePoly::new(&coeffs, m))
}

/// `(Z/mZ)[x]/(f)` assembled from Galois ring components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeCtx {
    components: Vec<RingCtx>,
    m: i128,
    f: CompositePoly,
    n: usize,
}

/// Element of a composite ring: `n` centered coefficients mod `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositeElem(Vec<i128>);

impl CompositeElem {
    pub fn coeffs(&self) -> &[i128] {
        &self.0
    }
}

impl fmt::Display for CompositeElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let len = self.0.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        if len == 0 {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0[..len].iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl CompositeCtx {
    /// Distinct primes, common degree; the combined polynomial is computed.
    pub fn new(components: Vec<RingCtx>) -> Result<Self> {
        let polys: Vec<Poly> = components.iter().map(|c| c.defining_poly().clone()).collect();
        let f = crt_combine_polys(&polys)?;
        let n = components[0].degree();
        Ok(Self {
            m: f.modulus(),
            components,
            f,
            n,
        })
    }

    /// Like [`CompositeCtx::new`] but cross-checks a stored combined polynomial.
    pub fn with_combined(components: Vec<RingCtx>, f: &CompositePoly) -> Result<Self> {
        let ctx = Self::new(components)?;
        if ctx.f != *f {
            return Err(Error::ParamMismatch(format!(
                "combined polynomial {f} does not match components ({})",
                ctx.f
            )));
        }
        Ok(ctx)
    }

    pub fn components(&self) -> &[RingCtx] {
        &self.components
    }

    pub fn modulus(&self) -> i128 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn defining_poly(&self) -> &CompositePoly {
        &self.f
    }

    pub fn elem(&self, coeffs: &[i128]) -> CompositeElem {
        if coeffs.len() > self.n {
            return self.reduce_long(coeffs);
        }
        let mut v: Vec<i128> = coeffs.iter().map(|&c| centered(c, self.m)).collect();
        v.resize(self.n, 0);
        CompositeElem(v)
    }

    pub fn zero(&self) -> CompositeElem {
        CompositeElem(vec![0; self.n])
    }

    pub fn one(&self) -> CompositeElem {
        self.elem(&[1])
    }

    pub fn generator(&self) -> CompositeElem {
        self.elem(&[0, 1])
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> CompositeElem {
        CompositeElem((0..self.n).map(|_| centered(rng.gen_range(0..self.m), self.m)).collect())
    }

    pub fn contains(&self, a: &CompositeElem) -> bool {
        a.0.len() == self.n && a.0.iter().all(|&c| centered(c, self.m) == c)
    }

    fn check(&self, a: &CompositeElem) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    pub fn add(&self, a: &CompositeElem, b: &CompositeElem) -> Result<CompositeElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(CompositeElem(
            a.0.iter().zip(&b.0).map(|(x, y)| centered(x + y, self.m)).collect(),
        ))
    }

    pub fn sub(&self, a: &CompositeElem, b: &CompositeElem) -> Result<CompositeElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(CompositeElem(
            a.0.iter().zip(&b.0).map(|(x, y)| centered(x - y, self.m)).collect(),
        ))
    }

    pub fn mul(&self, a: &CompositeElem, b: &CompositeElem) -> Result<CompositeElem> {
        self.check(a)?;
        self.check(b)?;
        let mut prod = vec![0i128; 2 * self.n];
        for (i, x) in a.0.iter().enumerate() {
            for (j, y) in b.0.iter().enumerate() {
                prod[i + j] = centered(prod[i + j] + x * y, self.m);
            }
        }
        Ok(self.reduce_long(&prod))
    }

    /// Reduces a coefficient vector of any length modulo the monic `f`.
    fn reduce_long(&self, coeffs: &[i128]) -> CompositeElem {
        let n = self.n;
        let mut v: Vec<i128> = coeffs.iter().map(|&c| centered(c, self.m)).collect();
        for d in (n..v.len()).rev() {
            let lead = v[d];
            if lead == 0 {
                continue;
            }
            for i in 0..n {
                v[d - n + i] = centered(v[d - n + i] - lead * self.f.coeff(i), self.m);
            }
            v[d] = 0;
        }
        v.resize(n, 0);
        CompositeElem(v)
    }

    /// Evaluates a composite polynomial at `a`.
    pub fn eval(&self, g: &CompositePoly, a: &CompositeElem) -> Result<CompositeElem> {
        let mut acc = self.zero();
        for &c in g.coeffs().iter().rev() {
            acc = self.mul(&acc, a)?;
            acc.0[0] = centered(acc.0[0] + c, self.m);
        }
        Ok(acc)
    }

    /// Component reductions `a mod p_i^{s_i}`.
    pub fn split(&self, a: &CompositeElem) -> Result<Vec<RingElem>> {
        self.check(a)?;
        Ok(self.components.iter().map(|c| c.from_coeffs(&a.0)).collect())
    }

    /// Inverse of [`CompositeCtx::split`].
    pub fn combine(&self, parts: &[RingElem]) -> Result<CompositeElem> {
        if parts.len() != self.components.len() {
            return Err(Error::ParamMismatch(format!(
                "expected {} components, got {}",
                self.components.len(),
                parts.len()
            )));
        }
        for (c, a) in self.components.iter().zip(parts) {
            if !c.contains(a) {
                return Err(Error::CtxMismatch);
            }
        }
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let residues: Vec<(i128, i128)> = self
                .components
                .iter()
                .zip(parts)
                .map(|(c, a)| (a.rep().coeff(i), c.modulus().value()))
                .collect();
            out.push(crt_scalar(&residues)?.0);
        }
        Ok(CompositeElem(out))
    }
}

/// Componentwise isomorphisms glued into a map between composite rings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeIsomorphism {
    src: CompositeCtx,
    dst: CompositeCtx,
    parts: Vec<Isomorphism>,
    phi_x: CompositeElem,
}

impl CompositeIsomorphism {
    /// `parts[i]` must map `src.components()[i]` to `dst.components()[i]`.
    pub fn from_parts(src: CompositeCtx, dst: CompositeCtx, parts: Vec<Isomorphism>) -> Result<Self> {
        if parts.len() != src.components.len() || parts.len() != dst.components.len() {
            return Err(Error::ParamMismatch("component count".into()));
        }
        for ((iso, s), d) in parts.iter().zip(&src.components).zip(&dst.components) {
            if iso.src() != s || iso.dst() != d {
                return Err(Error::ParamMismatch("component isomorphism does not match".into()));
            }
        }
        let images: Vec<RingElem> = parts.iter().map(|iso| iso.image_of_x().clone()).collect();
        let phi_x = dst.combine(&images)?;
        if !dst.eval(src.defining_poly(), &phi_x)?.0.iter().all(|&c| c == 0) {
            return Err(Error::InvariantBreach("combined image of x is not a root of f".into()));
        }
        Ok(Self {
            src,
            dst,
            parts,
            phi_x,
        })
    }

    pub fn src(&self) -> &CompositeCtx {
        &self.src
    }

    pub fn dst(&self) -> &CompositeCtx {
        &self.dst
    }

    pub fn parts(&self) -> &[Isomorphism] {
        &self.parts
    }

    /// `Φ(x)`, which reduces to each component `φ_i(x)`.
    pub fn image_of_x(&self) -> &CompositeElem {
        &self.phi_x
    }

    /// Split, apply componentwise, combine.
    pub fn apply(&self, a: &CompositeElem) -> Result<CompositeElem> {
        let parts = self.src.split(a)?;
        let images = parts
            .iter()
            .zip(&self.parts)
            .map(|(x, iso)| iso.apply(x))
            .collect::<Result<Vec<_>>>()?;
        self.dst.combine(&images)
    }

    pub fn apply_inverse(&self, a: &CompositeElem) -> Result<CompositeElem> {
        let parts = self.dst.split(a)?;
        let images = parts
            .iter()
            .zip(&self.parts)
            .map(|(x, iso)| iso.apply_inverse(x))
            .collect::<Result<Vec<_>>>()?;
        self.src.combine(&images)
    }

    /// `a(Φ(x))` computed directly in the combined ring.
    pub fn apply_by_composition(&self, a: &CompositeElem) -> Result<CompositeElem> {
        self.src.check(a)?;
        let g = CompositePoly::new(&a.0, self.dst.m);
        self.dst.eval(&g, &self.phi_x)
    }
}

/// Pairs components by prime and builds each isomorphism.
pub fn build_composite_iso<R: Rng + ?Sized>(
    src: &CompositeCtx,
    dst: &CompositeCtx,
    rng: &mut R,
) -> Result<CompositeIsomorphism> {
    let key = |c: &RingCtx| (c.modulus().p(), c.modulus().s(), c.degree());
    let mut parts = Vec::with_capacity(src.components.len());
    let mut used = vec![false; dst.components.len()];
    let mut order = Vec::with_capacity(src.components.len());
    if src.components.len() != dst.components.len() {
        return Err(Error::ParamMismatch("component count differs".into()));
    }
    for s in &src.components {
        let j = (0..dst.components.len())
            .find(|&j| !used[j] && key(&dst.components[j]) == key(s))
            .ok_or_else(|| {
                Error::ParamMismatch(format!("no target component for modulus {}", s.modulus()))
            })?;
        used[j] = true;
        order.push(j);
        parts.push(build_ring_iso(s, &dst.components[j], rng)?);
    }
    // reorder the target so component i corresponds to component i
    let dst_sorted = CompositeCtx::new(order.iter().map(|&j| dst.components[j].clone()).collect())?;
    CompositeIsomorphism::from_parts(src.clone(), dst_sorted, parts)
}
