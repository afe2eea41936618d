//! GRI problem instances: short secret elements `a_i` drawn from `χ_β`, their
//! public images `A_i = φ(a_i)`, the decisional variant, and the reduction to
//! the finite-field problem when `β < p/2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gring::{build_ring_iso, Isomorphism, RingCtx, RingElem};
use crate::matrix::ModMatrix;
use crate::poly::Poly;
use crate::zmod::Modulus;

/// Parameters of a GRI instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GriParams {
    pub p: u64,
    pub s: u32,
    pub n: usize,
    pub beta: i128,
    pub k: usize,
}

impl GriParams {
    pub fn modulus(&self) -> Result<Modulus> {
        Modulus::new(self.p, self.s)
    }

    pub fn validate(&self) -> Result<Modulus> {
        let m = self.modulus()?;
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        ChiBeta::new(self.beta, self.n, m)?;
        Ok(m)
    }
}

/// Uniform distribution on ring elements whose coefficients lie in the closed
/// range `[-β, β]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChiBeta {
    beta: i128,
    n: usize,
    modulus: Modulus,
}

impl ChiBeta {
    pub fn new(beta: i128, n: usize, modulus: Modulus) -> Result<Self> {
        if beta < 1 || 2 * beta >= modulus.value() {
            return Err(Error::BetaOutOfRange {
                beta,
                modulus: modulus.value(),
            });
        }
        Ok(Self { beta, n, modulus })
    }

    pub fn beta(&self) -> i128 {
        self.beta
    }

    pub fn sample_coeffs<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i128> {
        (0..self.n)
            .map(|_| rng.gen_range(-self.beta..=self.beta))
            .collect()
    }

    /// Draws an element of `ctx`, which must match the distribution's degree
    /// and modulus.
    pub fn sample<R: Rng + ?Sized>(&self, ctx: &RingCtx, rng: &mut R) -> Result<RingElem> {
        if ctx.degree() != self.n || ctx.modulus() != self.modulus {
            return Err(Error::CtxMismatch);
        }
        Ok(ctx.from_coeffs(&self.sample_coeffs(rng)))
    }
}

/// The published part of an instance: the target ring and the images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicInstance {
    pub dst: RingCtx,
    pub images: Vec<RingElem>,
    pub beta: i128,
}

impl PublicInstance {
    pub fn k(&self) -> usize {
        self.images.len()
    }

    pub fn modulus(&self) -> Modulus {
        self.dst.modulus()
    }

    pub fn degree(&self) -> usize {
        self.dst.degree()
    }

    /// `P = (A_1ᵀ | … | A_kᵀ)`, an `n × k` matrix.
    pub fn image_matrix(&self) -> Result<ModMatrix> {
        let rows = self.images.iter().map(|a| self.dst.to_vec(a)).collect();
        Ok(ModMatrix::from_rows(rows, self.modulus())?.transpose())
    }
}

/// The hidden part: the source ring, the isomorphism and the short preimages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GriSecret {
    pub iso: Isomorphism,
    pub preimages: Vec<RingElem>,
}

impl GriSecret {
    pub fn src(&self) -> &RingCtx {
        self.iso.src()
    }

    /// `Q = (a_1ᵀ | … | a_kᵀ)`; row `j` is the short lattice vector `b_j`.
    pub fn preimage_matrix(&self) -> Result<ModMatrix> {
        let ctx = self.iso.src();
        let rows = self.preimages.iter().map(|a| ctx.to_vec(a)).collect();
        Ok(ModMatrix::from_rows(rows, ctx.modulus())?.transpose())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GriInstance {
    pub public: PublicInstance,
    pub secret: GriSecret,
}

impl GriInstance {
    pub fn beta(&self) -> i128 {
        self.public.beta
    }

    pub fn params(&self) -> GriParams {
        let m = self.public.modulus();
        GriParams {
            p: m.p(),
            s: m.s(),
            n: self.public.degree(),
            beta: self.public.beta,
            k: self.public.k(),
        }
    }

    /// Assembles an instance around an existing isomorphism.
    pub fn from_preimages(iso: Isomorphism, preimages: Vec<RingElem>, beta: i128) -> Result<Self> {
        let images = preimages
            .iter()
            .map(|a| iso.apply(a))
            .collect::<Result<Vec<_>>>()?;
        let inst = Self {
            public: PublicInstance {
                dst: iso.dst().clone(),
                images,
                beta,
            },
            secret: GriSecret { iso, preimages },
        };
        inst.verify()?;
        Ok(inst)
    }

    /// Checks `φ(a_i) = A_i` and the coefficient bound on every `a_i`.
    pub fn verify(&self) -> Result<()> {
        let s = &self.secret;
        if s.preimages.len() != self.public.images.len() {
            return Err(Error::InvariantBreach("preimage/image count differs".into()));
        }
        if s.iso.dst() != &self.public.dst {
            return Err(Error::CtxMismatch);
        }
        for (a, big_a) in s.preimages.iter().zip(&self.public.images) {
            if a.sup_norm() > self.public.beta {
                return Err(Error::InvariantBreach("preimage exceeds beta".into()));
            }
            if &s.iso.apply(a)? != big_a {
                return Err(Error::InvariantBreach("image does not match preimage".into()));
            }
        }
        Ok(())
    }

    /// A fresh decisional pair over this instance's isomorphism.
    pub fn challenge<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DecisionalChallenge> {
        let src = self.secret.src();
        let chi = ChiBeta::new(self.public.beta, src.degree(), src.modulus())?;
        let planted = self.secret.iso.apply(&chi.sample(src, rng)?)?;
        let uniform = self.public.dst.random(rng);
        let hidden = rng.gen_range(0..2usize);
        let pair = if hidden == 0 {
            [planted, uniform]
        } else {
            [uniform, planted]
        };
        Ok(DecisionalChallenge { pair, hidden })
    }
}

/// Generates `f` and `F` independently, builds `φ`, and publishes the images
/// of `k` samples from `χ_β`. With `s = 1` this is a finite-field instance.
pub fn gen_instance<R: Rng + ?Sized>(params: &GriParams, rng: &mut R) -> Result<GriInstance> {
    let m = params.validate()?;
    let src = RingCtx::new(&Poly::random_monic_irreducible(m, params.n, rng)?)?;
    let dst = RingCtx::new(&Poly::random_monic_irreducible(m, params.n, rng)?)?;
    let iso = build_ring_iso(&src, &dst, rng)?;
    sample_instance(iso, params.beta, params.k, rng)
}

/// Draws `k` preimages from `χ_β` for a fixed isomorphism.
pub fn sample_instance<R: Rng + ?Sized>(
    iso: Isomorphism,
    beta: i128,
    k: usize,
    rng: &mut R,
) -> Result<GriInstance> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let src = iso.src();
    let chi = ChiBeta::new(beta, src.degree(), src.modulus())?;
    let preimages = (0..k)
        .map(|_| chi.sample(src, rng))
        .collect::<Result<Vec<_>>>()?;
    GriInstance::from_preimages(iso, preimages, beta)
}

/// Two candidate images, exactly one of which is `φ` of a `χ_β` sample. The
/// `hidden` index points at it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionalChallenge {
    pub pair: [RingElem; 2],
    pub hidden: usize,
}

/// A fresh instance together with one decisional challenge over it.
pub fn gen_decisional<R: Rng + ?Sized>(
    params: &GriParams,
    rng: &mut R,
) -> Result<(GriInstance, DecisionalChallenge)> {
    let inst = gen_instance(params, rng)?;
    let ch = inst.challenge(rng)?;
    Ok((inst, ch))
}

/// Reduces every datum mod `p`. Needs `β < p/2` so the short preimages are
/// unchanged by centered reduction.
pub fn reduce_to_ffi(inst: &GriInstance) -> Result<GriInstance> {
    let m = inst.public.modulus();
    let beta = inst.public.beta;
    if 2 * beta >= m.p() as i128 {
        return Err(Error::BetaTooLarge { beta, p: m.p() });
    }
    let r = m.residue();
    let reduce_ctx = |ctx: &RingCtx| RingCtx::new(&ctx.defining_poly().reduce_mod_p());
    let src = reduce_ctx(inst.secret.src())?;
    let dst = reduce_ctx(&inst.public.dst)?;
    let down = |ctx: &RingCtx, a: &RingElem| ctx.elem(&a.rep().with_modulus(r));
    let phi = down(&dst, inst.secret.iso.image_of_x())?;
    let iso = Isomorphism::from_image(src.clone(), dst.clone(), phi)?;
    let preimages = inst
        .secret
        .preimages
        .iter()
        .map(|a| down(&src, a))
        .collect::<Result<Vec<_>>>()?;
    let images = inst
        .public
        .images
        .iter()
        .map(|a| down(&dst, a))
        .collect::<Result<Vec<_>>>()?;
    let out = GriInstance {
        public: PublicInstance { dst, images, beta },
        secret: GriSecret { iso, preimages },
    };
    out.verify()?;
    Ok(out)
}

/// A strategy that guesses which member of a challenge pair is the image of
/// a short element. Returns `0` or `1`.
pub trait Distinguisher: Sync {
    fn guess(&self, public: &PublicInstance, pair: &[RingElem; 2], rng: &mut ChaCha8Rng) -> usize;
}

/// Coin flip baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomGuess;

impl Distinguisher for RandomGuess {
    fn guess(&self, _: &PublicInstance, _: &[RingElem; 2], rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(0..2)
    }
}

/// Holds the secret `N`: pulls both candidates back and picks the first one
/// whose coefficients are all within `β`.
#[derive(Debug, Clone)]
pub struct SecretOracle {
    iso: Isomorphism,
    beta: i128,
}

impl SecretOracle {
    pub fn new(inst: &GriInstance) -> Self {
        Self {
            iso: inst.secret.iso.clone(),
            beta: inst.public.beta,
        }
    }

    pub fn is_short_preimage(&self, a: &RingElem) -> bool {
        self.iso
            .apply_inverse(a)
            .map(|pre| pre.sup_norm() <= self.beta)
            .unwrap_or(false)
    }
}

impl Distinguisher for SecretOracle {
    fn guess(&self, _: &PublicInstance, pair: &[RingElem; 2], _: &mut ChaCha8Rng) -> usize {
        if self.is_short_preimage(&pair[0]) {
            0
        } else {
            1
        }
    }
}

/// Empirical success rate with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvantageReport {
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl AdvantageReport {
    pub fn new(trials: usize, successes: usize) -> Self {
        let (low, high) = wilson_interval(successes, trials, 1.96);
        Self {
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            wilson_low: low,
            wilson_high: high,
        }
    }
}

pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Runs `trials` fresh challenges over `inst`. Trial `t` draws from its own
/// ChaCha stream `t` under `seed`, so the report does not depend on
/// scheduling.
pub fn run_distinguisher_experiment<D: Distinguisher + ?Sized>(
    inst: &GriInstance,
    distinguisher: &D,
    trials: usize,
    seed: u64,
) -> Result<AdvantageReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let ch = inst.challenge(&mut rng)?;
            let g = distinguisher.guess(&inst.public, &ch.pair, &mut rng);
            Ok(usize::from(g == ch.hidden))
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(AdvantageReport::new(trials, outcomes.into_iter().sum()))
}
