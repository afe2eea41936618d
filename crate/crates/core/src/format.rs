//! Line-oriented text serialization.
//!
//! Every file starts with `format: <kind> v1` and continues with one
//! `key: value` per line. Polynomials are written as ascending,
//! comma-separated centered coefficients. Fields whose key starts with
//! `secret.` belong to the key holder; public loaders skip them unread.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::crt::{CompositeCtx, CompositeIsomorphism, CompositePoly};
use crate::error::{Error, Result};
use crate::gri::{ChiBeta, GriInstance, GriParams, GriSecret, PublicInstance};
use crate::gring::{Isomorphism, RingCtx, RingElem};
use crate::poly::Poly;
use crate::zmod::Modulus;

pub const PARAMS_KIND: &str = "griforge-params";
pub const INSTANCE_KIND: &str = "griforge-instance";
pub const COMPOSITE_KIND: &str = "griforge-composite";
const VERSION: &str = "v1";
const SECRET_PREFIX: &str = "secret.";

/// An ordered list of named fields under a format header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    kind: String,
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            fields: Vec::new(),
        }
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
    }

    pub fn number<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.require(key)?;
        v.parse()
            .map_err(|_| Error::Parse(format!("field `{key}`: cannot parse `{v}`")))
    }

    pub fn optional_number<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            Some(_) => self.number(key).map(Some),
            None => Ok(None),
        }
    }

    pub fn has_secrets(&self) -> bool {
        self.fields.iter().any(|(k, _)| k.starts_with(SECRET_PREFIX))
    }

    pub fn to_text(&self, public_only: bool) -> String {
        let mut out = format!("format: {} {VERSION}\n", self.kind);
        for (k, v) in &self.fields {
            if public_only && k.starts_with(SECRET_PREFIX) {
                continue;
            }
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }

    /// Parses a record. With `public_only`, `secret.*` lines are dropped
    /// before their values are looked at.
    pub fn parse(text: &str, expected_kind: &str, public_only: bool) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?;
        let kind = header
            .strip_prefix("format:")
            .map(str::trim)
            .ok_or_else(|| Error::Parse("first line must be `format: <kind> v1`".into()))?;
        let (name, version) = kind
            .split_once(' ')
            .ok_or_else(|| Error::Parse(format!("bad format line `{header}`")))?;
        if name != expected_kind {
            return Err(Error::Parse(format!("expected a {expected_kind} file, found {name}")));
        }
        if version.trim() != VERSION {
            return Err(Error::Parse(format!("unsupported version `{}`", version.trim())));
        }
        let mut rec = Record::new(name);
        for line in lines {
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `key: value`, found `{line}`")))?;
            let k = k.trim();
            if public_only && k.starts_with(SECRET_PREFIX) {
                continue;
            }
            if rec.get(k).is_some() {
                return Err(Error::Parse(format!("duplicate field `{k}`")));
            }
            rec.push(k, v.trim());
        }
        Ok(rec)
    }
}

fn parse_coeffs(text: &str) -> Result<Vec<i128>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<i128>()
                .map_err(|_| Error::Parse(format!("bad coefficient `{}`", t.trim())))
        })
        .collect()
}

fn ring_from(rec: &Record, key: &str, m: Modulus, n: usize) -> Result<RingCtx> {
    let f = Poly::parse(rec.require(key)?, m)?;
    if f.degree() != Some(n) {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: f.degree().unwrap_or(0),
        });
    }
    RingCtx::new(&f)
}

fn elem_from(rec: &Record, key: &str, ctx: &RingCtx) -> Result<RingElem> {
    ctx.elem(&Poly::parse(rec.require(key)?, ctx.modulus())?)
}

/// Parameters: the public target polynomial `F`, optionally the secret
/// source polynomial `f` and image `φ(x)`, plus sampling settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamFile {
    pub dst: RingCtx,
    pub src: Option<RingCtx>,
    pub iso: Option<Isomorphism>,
    pub beta: Option<i128>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

impl ParamFile {
    pub fn modulus(&self) -> Modulus {
        self.dst.modulus()
    }

    pub fn degree(&self) -> usize {
        self.dst.degree()
    }

    pub fn to_record(&self) -> Record {
        let m = self.modulus();
        let mut r = Record::new(PARAMS_KIND);
        r.push("p", m.p());
        r.push("s", m.s());
        r.push("n", self.degree());
        if let Some(b) = self.beta {
            r.push("beta", b);
        }
        if let Some(k) = self.k {
            r.push("k", k);
        }
        if let Some(seed) = self.seed {
            r.push("seed", seed);
        }
        r.push("F", self.dst.defining_poly());
        if let Some(src) = &self.src {
            r.push("secret.f", src.defining_poly());
        }
        if let Some(iso) = &self.iso {
            r.push("secret.phi_x", iso.image_of_x().rep());
        }
        r
    }

    pub fn to_text(&self, public_only: bool) -> String {
        self.to_record().to_text(public_only)
    }

    /// Loads and validates: `F` and `f` must be monic irreducible of degree
    /// `n`, and a stored `φ(x)` must be a root of `f` in the target ring.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_record(&Record::parse(text, PARAMS_KIND, false)?)
    }

    pub fn parse_public(text: &str) -> Result<Self> {
        Self::from_record(&Record::parse(text, PARAMS_KIND, true)?)
    }

    fn from_record(rec: &Record) -> Result<Self> {
        let m = Modulus::new(rec.number("p")?, rec.number("s")?)?;
        let n: usize = rec.number("n")?;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let beta = rec.optional_number::<i128>("beta")?;
        if let Some(b) = beta {
            ChiBeta::new(b, n, m)?;
        }
        let k = rec.optional_number::<usize>("k")?;
        if k == Some(0) {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let seed = rec.optional_number("seed")?;
        let dst = ring_from(rec, "F", m, n)?;
        let src = match rec.get("secret.f") {
            Some(_) => Some(ring_from(rec, "secret.f", m, n)?),
            None => None,
        };
        let iso = match (rec.get("secret.phi_x"), &src) {
            (Some(_), Some(src)) => {
                let phi_x = elem_from(rec, "secret.phi_x", &dst)?;
                Some(Isomorphism::from_image(src.clone(), dst.clone(), phi_x)?)
            }
            (Some(_), None) => return Err(Error::Parse("secret.phi_x without secret.f".into())),
            (None, _) => None,
        };
        Ok(Self {
            dst,
            src,
            iso,
            beta,
            k,
            seed,
        })
    }

    /// `(p, s, n, β, k)`, when both sampling settings are present.
    pub fn gri_params(&self) -> Result<GriParams> {
        let m = self.modulus();
        Ok(GriParams {
            p: m.p(),
            s: m.s(),
            n: self.degree(),
            beta: self.beta.ok_or_else(|| Error::Parse("missing field `beta`".into()))?,
            k: self.k.ok_or_else(|| Error::Parse("missing field `k`".into()))?,
        })
    }
}

/// A GRI instance on disk: public images and, unless stripped, the secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub public: PublicInstance,
    pub secret: Option<GriSecret>,
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn from_instance(inst: &GriInstance, seed: Option<u64>) -> Self {
        Self {
            public: inst.public.clone(),
            secret: Some(inst.secret.clone()),
            seed,
        }
    }

    pub fn instance(&self) -> Result<GriInstance> {
        let secret = self
            .secret
            .clone()
            .ok_or_else(|| Error::Parse("file carries no secret fields".into()))?;
        let inst = GriInstance {
            public: self.public.clone(),
            secret,
        };
        inst.verify()?;
        Ok(inst)
    }

    pub fn to_record(&self) -> Record {
        let pubi = &self.public;
        let m = pubi.modulus();
        let mut r = Record::new(INSTANCE_KIND);
        r.push("p", m.p());
        r.push("s", m.s());
        r.push("n", pubi.degree());
        r.push("beta", pubi.beta);
        r.push("k", pubi.k());
        if let Some(seed) = self.seed {
            r.push("seed", seed);
        }
        r.push("F", pubi.dst.defining_poly());
        for (i, a) in pubi.images.iter().enumerate() {
            r.push(format!("A.{i}"), a.rep());
        }
        if let Some(sec) = &self.secret {
            r.push("secret.f", sec.src().defining_poly());
            r.push("secret.phi_x", sec.iso.image_of_x().rep());
            for (i, a) in sec.preimages.iter().enumerate() {
                r.push(format!("secret.a.{i}"), a.rep());
            }
        }
        r
    }

    pub fn to_text(&self, public_only: bool) -> String {
        self.to_record().to_text(public_only)
    }

    /// Full load; secret fields, when present, are validated against the
    /// public images.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_record(&Record::parse(text, INSTANCE_KIND, false)?)
    }

    /// Public load; secret lines are skipped without being parsed.
    pub fn parse_public(text: &str) -> Result<Self> {
        Self::from_record(&Record::parse(text, INSTANCE_KIND, true)?)
    }

    fn from_record(rec: &Record) -> Result<Self> {
        let m = Modulus::new(rec.number("p")?, rec.number("s")?)?;
        let n: usize = rec.number("n")?;
        let beta: i128 = rec.number("beta")?;
        let k: usize = rec.number("k")?;
        GriParams { p: m.p(), s: m.s(), n, beta, k }.validate()?;
        let seed = rec.optional_number("seed")?;
        let dst = ring_from(rec, "F", m, n)?;
        let images = (0..k)
            .map(|i| elem_from(rec, &format!("A.{i}"), &dst))
            .collect::<Result<Vec<_>>>()?;
        let public = PublicInstance { dst, images, beta };
        let secret = if rec.has_secrets() {
            let src = ring_from(rec, "secret.f", m, n)?;
            let phi_x = elem_from(rec, "secret.phi_x", &public.dst)?;
            let iso = Isomorphism::from_image(src, public.dst.clone(), phi_x)?;
            let preimages = (0..k)
                .map(|i| elem_from(rec, &format!("secret.a.{i}"), iso.src()))
                .collect::<Result<Vec<_>>>()?;
            let inst = GriInstance {
                public: public.clone(),
                secret: GriSecret { iso, preimages },
            };
            inst.verify()?;
            Some(inst.secret)
        } else {
            None
        };
        Ok(Self {
            public,
            secret,
            seed,
        })
    }
}

/// A composite ring (and optionally a composite isomorphism into it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeFile {
    pub dst: CompositeCtx,
    pub iso: Option<CompositeIsomorphism>,
}

impl CompositeFile {
    pub fn to_record(&self) -> Record {
        let mut r = Record::new(COMPOSITE_KIND);
        let comps = self.dst.components();
        r.push("components", comps.len());
        r.push("n", self.dst.degree());
        for (i, c) in comps.iter().enumerate() {
            r.push(format!("component.{i}.p"), c.modulus().p());
            r.push(format!("component.{i}.s"), c.modulus().s());
            r.push(format!("component.{i}.F"), c.defining_poly());
        }
        r.push("m", self.dst.modulus());
        r.push("F", self.dst.defining_poly());
        if let Some(iso) = &self.iso {
            for (i, part) in iso.parts().iter().enumerate() {
                r.push(format!("secret.component.{i}.f"), part.src().defining_poly());
                r.push(format!("secret.component.{i}.phi_x"), part.image_of_x().rep());
            }
            r.push("secret.f", iso.src().defining_poly());
            r.push("secret.phi_x", iso.image_of_x());
        }
        r
    }

    pub fn to_text(&self, public_only: bool) -> String {
        self.to_record().to_text(public_only)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_record(&Record::parse(text, COMPOSITE_KIND, false)?)
    }

    pub fn parse_public(text: &str) -> Result<Self> {
        Self::from_record(&Record::parse(text, COMPOSITE_KIND, true)?)
    }

    fn from_record(rec: &Record) -> Result<Self> {
        let count: usize = rec.number("components")?;
        let n: usize = rec.number("n")?;
        let mut comps = Vec::with_capacity(count);
        let mut mods = Vec::with_capacity(count);
        for i in 0..count {
            let m = Modulus::new(
                rec.number(&format!("component.{i}.p"))?,
                rec.number(&format!("component.{i}.s"))?,
            )?;
            comps.push(ring_from(rec, &format!("component.{i}.F"), m, n)?);
            mods.push(m);
        }
        let m: i128 = rec.number("m")?;
        let big_f = CompositePoly::new(&parse_coeffs(rec.require("F")?)?, m);
        let dst = CompositeCtx::with_combined(comps, &big_f)?;
        if dst.modulus() != m {
            return Err(Error::ParamMismatch(format!("m = {m} but components give {}", dst.modulus())));
        }
        let iso = if rec.has_secrets() {
            let mut src_comps = Vec::with_capacity(count);
            let mut parts = Vec::with_capacity(count);
            for (i, (&md, dc)) in mods.iter().zip(dst.components()).enumerate() {
                let src = ring_from(rec, &format!("secret.component.{i}.f"), md, n)?;
                let phi_x = elem_from(rec, &format!("secret.component.{i}.phi_x"), dc)?;
                parts.push(Isomorphism::from_image(src.clone(), dc.clone(), phi_x)?);
                src_comps.push(src);
            }
            let f = CompositePoly::new(&parse_coeffs(rec.require("secret.f")?)?, m);
            let src = CompositeCtx::with_combined(src_comps, &f)?;
            let iso = CompositeIsomorphism::from_parts(src, dst.clone(), parts)?;
            let stored = dst.elem(&parse_coeffs(rec.require("secret.phi_x")?)?);
            if &stored != iso.image_of_x() {
                return Err(Error::ParamMismatch(
                    "secret.phi_x does not match the component images".into(),
                ));
            }
            Some(iso)
        } else {
            None
        };
        Ok(Self { dst, iso })
    }
}
