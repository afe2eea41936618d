//! The lattice attack on GRI instances.
//!
//! With `P = (A_1ᵀ | … | A_kᵀ)` built from the public images, the lattice
//! `L(D)` generated by the rows of `D = (P ; p^s I_k)` contains every
//! `b_j = (a_1[j], …, a_k[j])`, the vector of `j`-th coefficients of the
//! secret preimages. When `k` is large enough these vectors are unusually
//! short and lattice reduction exposes them.
//!
//! All lattice arithmetic is exact: LLL runs on integers with the
//! Gram-Schmidt data kept as exact subdeterminant ratios.

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gri::PublicInstance;
use crate::gring::{Isomorphism, RingCtx, RingElem};
use crate::matrix::ModMatrix;
use crate::poly::Poly;
use crate::zmod::Modulus;

/// Rectangular matrix of arbitrary-precision integers, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    cols: usize,
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged matrix rows".into()));
        }
        Ok(Self { cols, rows })
    }

    pub fn from_i128(rows: &[Vec<i128>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
            cols,
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// Rows as `i128`, if every entry fits.
    pub fn to_i128(&self) -> Option<Vec<Vec<i128>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(ToPrimitive::to_i128).collect())
            .collect()
    }

    /// `B Bᵀ`.
    pub fn gram(&self) -> IntMatrix {
        let n = self.rows.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| dot(&self.rows[i], &self.rows[j])).collect())
            .collect();
        IntMatrix { cols: n, rows }
    }

    /// Determinant of a square matrix by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        let n = self.rows.len();
        if n != self.cols {
            return Err(Error::DegreeMismatch {
                expected: n,
                found: self.cols,
            });
        }
        if n == 0 {
            return Ok(BigInt::from(1));
        }
        let mut a = self.rows.clone();
        let mut sign = 1;
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(&a[n - 1][n - 1] * sign)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{}", join(row))?;
        }
        Ok(())
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub_scaled(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

/// `D = (P ; p^s I_k)`: the first `n` rows hold the `i`-th coefficients of
/// `A_1..A_k`, the last `k` rows are `p^s` times the identity.
pub fn build_attack_lattice(images: &[RingElem], dst: &RingCtx) -> Result<IntMatrix> {
    if images.is_empty() {
        return Err(Error::InvalidParameter("need at least one image".into()));
    }
    if images.iter().any(|a| !dst.contains(a)) {
        return Err(Error::CtxMismatch);
    }
    let (n, k) = (dst.degree(), images.len());
    let q = dst.modulus().value();
    let mut rows: Vec<Vec<i128>> = (0..n)
        .map(|i| images.iter().map(|a| a.rep().coeff(i)).collect())
        .collect();
    for j in 0..k {
        let mut r = vec![0; k];
        r[j] = q;
        rows.push(r);
    }
    IntMatrix::from_i128(&rows)
}

/// Echelon-form basis of the lattice generated by the rows of `gens`
/// (row-style Hermite normal form; zero rows are dropped).
pub fn row_basis(gens: &IntMatrix) -> IntMatrix {
    let mut rows = gens.rows.clone();
    let ncols = gens.cols;
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        loop {
            let pivot = (r..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by_key(|&i| rows[i][col].abs());
            let Some(pi) = pivot else { break };
            rows.swap(r, pi);
            let mut clean = true;
            for i in r + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[r][col]);
                let (head, tail) = rows.split_at_mut(i);
                sub_scaled(&mut tail[0], &head[r], &q);
                if !rows[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if r < rows.len() && !rows[r][col].is_zero() {
            if rows[r][col].is_negative() {
                for v in rows[r].iter_mut() {
                    *v = -&*v;
                }
            }
            for i in 0..r {
                let q = rows[i][col].div_floor(&rows[r][col]);
                if !q.is_zero() {
                    let (head, tail) = rows.split_at_mut(r);
                    sub_scaled(&mut head[i], &tail[0], &q);
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    IntMatrix { cols: ncols, rows }
}

/// A lattice given by an echelon basis, supporting exact membership tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    basis: IntMatrix,
}

impl Lattice {
    pub fn generated_by(gens: &IntMatrix) -> Self {
        Self {
            basis: row_basis(gens),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Absolute determinant `sqrt(det(B Bᵀ))` as a float, for heuristics.
    pub fn log_volume(&self) -> f64 {
        let g = self.basis.gram().determinant().unwrap_or_default();
        0.5 * ln_big(&g)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.len() != self.basis.cols {
            return false;
        }
        let mut v = v.to_vec();
        for row in &self.basis.rows {
            let Some(c) = row.iter().position(|x| !x.is_zero()) else {
                continue;
            };
            let (q, rem) = v[c].div_rem(&row[c]);
            if !rem.is_zero() {
                return false;
            }
            sub_scaled(&mut v, row, &q);
        }
        v.iter().all(Zero::is_zero)
    }
}

fn ln_big(x: &BigInt) -> f64 {
    let x = x.abs();
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 900;
        (&x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Default Lovász parameter, 99/100.
pub fn default_delta() -> Rational64 {
    Rational64::new(99, 100)
}

/// LLL-reduces the lattice generated by the rows of `gens`. Dependent rows
/// are first eliminated via [`row_basis`]; the reduction itself is the
/// integral variant that tracks `d_i = det(Gram_i)` and `λ_{ij} = d_j μ_{ij}`
/// so every Gram-Schmidt quantity stays exact.
pub fn lll_reduce(gens: &IntMatrix, delta: Rational64) -> Result<IntMatrix> {
    let quarter = Rational64::new(1, 4);
    if delta <= quarter || delta >= Rational64::from_integer(1) {
        return Err(Error::BadDelta);
    }
    let basis = row_basis(gens);
    let mut lll = IntegralLll::new(basis.rows, delta);
    lll.run()?;
    Ok(IntMatrix {
        cols: gens.cols,
        rows: lll.into_rows(),
    })
}

/// One-based bookkeeping for integral LLL.
struct IntegralLll {
    b: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
    lam: Vec<Vec<BigInt>>,
    num: BigInt,
    den: BigInt,
}

impl IntegralLll {
    fn new(rows: Vec<Vec<BigInt>>, delta: Rational64) -> Self {
        let n = rows.len();
        let mut b = Vec::with_capacity(n + 1);
        b.push(Vec::new());
        b.extend(rows);
        Self {
            b,
            d: vec![BigInt::zero(); n + 1],
            lam: vec![vec![BigInt::zero(); n + 1]; n + 1],
            num: BigInt::from(*delta.numer()),
            den: BigInt::from(*delta.denom()),
        }
    }

    fn into_rows(mut self) -> Vec<Vec<BigInt>> {
        self.b.remove(0);
        self.b
    }

    fn n(&self) -> usize {
        self.b.len() - 1
    }

    fn run(&mut self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Ok(());
        }
        self.d[0] = BigInt::from(1);
        self.d[1] = dot(&self.b[1], &self.b[1]);
        let mut k = 2;
        let mut kmax = 1;
        while k <= n {
            if k > kmax {
                kmax = k;
                self.incorporate(k)?;
            }
            self.reduce(k, k - 1);
            let lhs = &self.den * &self.d[k] * &self.d[k - 2];
            let l = &self.lam[k][k - 1];
            let rhs = &self.num * &self.d[k - 1] * &self.d[k - 1] - &self.den * l * l;
            if lhs < rhs {
                self.swap(k, kmax);
                k = (k - 1).max(2);
            } else {
                for l in (1..k - 1).rev() {
                    self.reduce(k, l);
                }
                k += 1;
            }
        }
        Ok(())
    }

    fn incorporate(&mut self, k: usize) -> Result<()> {
        for j in 1..=k {
            let mut u = dot(&self.b[k], &self.b[j]);
            for i in 1..j {
                u = (&self.d[i] * &u - &self.lam[k][i] * &self.lam[j][i]) / &self.d[i - 1];
            }
            if j < k {
                self.lam[k][j] = u;
            } else {
                if u.is_zero() {
                    return Err(Error::InvariantBreach("LLL input rows are dependent".into()));
                }
                self.d[k] = u;
            }
        }
        Ok(())
    }

    fn reduce(&mut self, k: usize, l: usize) {
        let two_lam: BigInt = &self.lam[k][l] * 2;
        if two_lam.abs() <= self.d[l] {
            return;
        }
        // q = round(λ_{kl} / d_l)
        let q = (two_lam + &self.d[l]).div_floor(&(&self.d[l] * 2));
        let (head, tail) = self.b.split_at_mut(k);
        sub_scaled(&mut tail[0], &head[l], &q);
        self.lam[k][l] -= &q * &self.d[l];
        for i in 1..l {
            let v = &q * &self.lam[l][i];
            self.lam[k][i] -= v;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        for j in 1..k - 1 {
            let t = std::mem::take(&mut self.lam[k][j]);
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let big_b = (&self.d[k - 2] * &self.d[k] + &lam * &lam) / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            self.lam[i][k] = (&self.d[k] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k - 1];
            self.lam[i][k - 1] = (&big_b * &t + &lam * &self.lam[i][k]) / &self.d[k];
        }
        self.d[k - 1] = big_b;
    }
}

/// A short vector pulled out of a reduced basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub vector: Vec<i128>,
    pub sup_norm: i128,
    pub in_lattice: bool,
}

impl Candidate {
    pub fn norm(&self) -> f64 {
        self.vector
            .iter()
            .map(|&v| (v as f64) * (v as f64))
            .sum::<f64>()
            .sqrt()
    }
}

/// Nonzero reduced-basis vectors with sup-norm at most `beta`, together with
/// their negations, each re-checked for membership in `lattice`.
pub fn extract_short_vectors(reduced: &IntMatrix, beta: i128, lattice: &Lattice) -> Vec<Candidate> {
    let bound = BigInt::from(beta);
    let mut out = Vec::new();
    for row in reduced.rows() {
        let sup = row.iter().map(Signed::abs).max().unwrap_or_default();
        if sup.is_zero() || sup > bound {
            continue;
        }
        let Some(v) = row.iter().map(ToPrimitive::to_i128).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let neg: Vec<i128> = v.iter().map(|x| -x).collect();
        for vec in [v, neg] {
            let big: Vec<BigInt> = vec.iter().map(|&x| BigInt::from(x)).collect();
            let in_lattice = lattice.contains(&big);
            if in_lattice && !out.iter().any(|c: &Candidate| c.vector == vec) {
                out.push(Candidate {
                    sup_norm: sup.to_i128().unwrap_or(i128::MAX),
                    vector: vec,
                    in_lattice,
                });
            }
        }
    }
    out
}

/// A key reassembled from `n` candidates: an isomorphism into the public
/// ring and the short preimages it explains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredKey {
    pub iso: Isomorphism,
    pub preimages: Vec<RingElem>,
}

#[derive(Debug, Clone)]
pub struct AttackReport {
    pub modulus: Modulus,
    pub n: usize,
    pub k: usize,
    pub beta: i128,
    pub delta: Rational64,
    pub lattice_rank: usize,
    pub reduced: IntMatrix,
    pub candidates: Vec<Candidate>,
    /// `sqrt(rank / 2πe) · vol^(1/rank)`.
    pub gaussian_heuristic: f64,
    pub first_vector_norm: f64,
    pub recovered: Option<RecoveredKey>,
    pub elapsed: Duration,
}

impl AttackReport {
    /// Ratio of the first reduced vector's length to the Gaussian heuristic.
    pub fn heuristic_ratio(&self) -> f64 {
        self.first_vector_norm / self.gaussian_heuristic
    }

    /// Structured text rendering, one `key: value` per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "format: griforge-attack-report v1");
        let _ = writeln!(s, "p: {}", self.modulus.p());
        let _ = writeln!(s, "s: {}", self.modulus.s());
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "k: {}", self.k);
        let _ = writeln!(s, "beta: {}", self.beta);
        let _ = writeln!(s, "delta: {}", self.delta);
        let _ = writeln!(s, "lattice_rank: {}", self.lattice_rank);
        let _ = writeln!(s, "gaussian_heuristic: {:.4}", self.gaussian_heuristic);
        let _ = writeln!(s, "first_vector_norm: {:.4}", self.first_vector_norm);
        let _ = writeln!(s, "heuristic_ratio: {:.4}", self.heuristic_ratio());
        let _ = writeln!(s, "candidates: {}", self.candidates.len());
        let verified = self.candidates.iter().filter(|c| c.in_lattice).count();
        let _ = writeln!(s, "verified_candidates: {verified}");
        for (i, c) in self.candidates.iter().enumerate() {
            let _ = writeln!(s, "candidate.{i}: {}", join(&c.vector));
        }
        if !self.candidates.is_empty() {
            let _ = writeln!(
                s,
                "note: a candidate may be a combination of several secret coordinate vectors"
            );
        }
        match &self.recovered {
            Some(key) => {
                let _ = writeln!(s, "key_recovered: yes");
                let _ = writeln!(s, "recovered.f: {}", key.iso.src().defining_poly());
                let _ = writeln!(s, "recovered.phi_x: {}", key.iso.image_of_x().rep());
            }
            None => {
                let _ = writeln!(s, "key_recovered: no");
            }
        }
        let _ = writeln!(s, "elapsed_ms: {}", self.elapsed.as_millis());
        s
    }
}

/// Builds `L(D)` from the public images, LLL-reduces it and collects the
/// short candidates. When `n` candidates independent mod `p` exist it also
/// tries to reassemble the key (see [`recover_key`]).
pub fn run_attack(public: &PublicInstance, delta: Rational64) -> Result<AttackReport> {
    let start = Instant::now();
    let d = build_attack_lattice(&public.images, &public.dst)?;
    let lattice = Lattice::generated_by(&d);
    let reduced = lll_reduce(&d, delta)?;
    let candidates = extract_short_vectors(&reduced, public.beta, &lattice);
    let rank = lattice.rank();
    let gh = ((rank as f64) / (2.0 * std::f64::consts::PI * std::f64::consts::E)).sqrt()
        * (lattice.log_volume() / rank as f64).exp();
    let first = reduced
        .rows()
        .first()
        .map(|r| ln_big(&dot(r, r)) / 2.0)
        .map_or(0.0, f64::exp);
    let recovered = recover_key(public, &reduced, &candidates)?;
    Ok(AttackReport {
        modulus: public.modulus(),
        n: public.degree(),
        k: public.k(),
        beta: public.beta,
        delta,
        lattice_rank: rank,
        reduced,
        candidates,
        gaussian_heuristic: gh,
        first_vector_norm: first,
        recovered,
        elapsed: start.elapsed(),
    })
}

/// Tries to turn short lattice vectors into a full key without the secret.
///
/// Every short vector `c` in `L(D)` solves `u_c P ≡ c` (mod `p^s`), and
/// `c = Σ g_j b_j` gives `u_c[0] = g_0` because `φ^{-1}(1) = 1`. So the
/// `b_j` consist of one vector with `u[0] = ±1` and `n - 1` with `u[0] = 0`.
/// The pool is the candidates plus short `{-1, 0, 1}`-combinations of
/// reduced rows (LLL often returns `b_i ± b_j` instead of `b_i`); subsets
/// of the right shape, independent mod `p`, are tried in order of length.
///
/// For a subset, `N' = (u_1 | … | u_n)` is inverted. If the subset is the
/// `b_j` up to order and sign, the rows of `M' = N'^{-1}` are `±φ(x)^i`;
/// the routine looks for an element whose powers match those rows, reads
/// the defining polynomial off `φ(x)^n` and keeps the isomorphism only if
/// it maps short preimages onto every public image.
pub fn recover_key(
    public: &PublicInstance,
    reduced: &IntMatrix,
    candidates: &[Candidate],
) -> Result<Option<RecoveredKey>> {
    let n = public.degree();
    let m = public.modulus();
    if n < 2 {
        return Ok(None);
    }
    let mut pool: Vec<Vec<i128>> = candidates.iter().map(|c| c.vector.clone()).collect();
    pool.extend(short_combinations(reduced, public.beta));
    let p_mat = public.image_matrix()?;
    let norm2 = |v: &[i128]| v.iter().map(|x| x * x).sum::<i128>();
    pool.sort_by_key(|v| norm2(v));
    pool.truncate(MAX_POOL);
    let (mut lead, mut rest) = (Vec::new(), Vec::new());
    for c in pool {
        let Ok(Some(u)) = p_mat.solve_left(&c) else {
            continue;
        };
        let (u, c) = if u[0] == -1 {
            (u.iter().map(|&x| m.reduce(-x)).collect(), c.iter().map(|x| -x).collect())
        } else {
            (u, c)
        };
        let class = match u[0] {
            1 => &mut lead,
            0 => &mut rest,
            _ => continue,
        };
        if !class.iter().any(|(_, w): &(Vec<i128>, Vec<i128>)| *w == u || w.iter().all(|&x| x == 0)) {
            let neg: Vec<i128> = u.iter().map(|&x| m.reduce(-x)).collect();
            if !class.iter().any(|(_, w)| *w == neg) {
                class.push((c, u));
            }
        }
    }
    let mut search = SubsetSearch {
        public,
        rest: &rest,
        chosen: Vec::with_capacity(n),
        budget: RECOVERY_BUDGET,
    };
    for (_, u) in &lead {
        search.chosen.clear();
        search.chosen.push(u.clone());
        if let Some(key) = search.extend(0)? {
            return Ok(Some(key));
        }
        if search.budget == 0 {
            break;
        }
    }
    Ok(None)
}

/// Upper bound on the number of complete subsets examined.
const RECOVERY_BUDGET: usize = 2_000;
/// Only the shortest pool vectors take part in the subset search.
const MAX_POOL: usize = 48;

struct SubsetSearch<'a> {
    public: &'a PublicInstance,
    rest: &'a [(Vec<i128>, Vec<i128>)],
    chosen: Vec<Vec<i128>>,
    budget: usize,
}

impl SubsetSearch<'_> {
    fn extend(&mut self, from: usize) -> Result<Option<RecoveredKey>> {
        let n = self.public.degree();
        if self.chosen.len() == n {
            self.budget = self.budget.saturating_sub(1);
            return self.test();
        }
        for i in from..self.rest.len() {
            if self.budget == 0 || self.rest.len() - i < n - self.chosen.len() {
                break;
            }
            self.chosen.push(self.rest[i].1.clone());
            if independent_mod_p(&self.chosen, self.public.modulus()) {
                if let Some(key) = self.extend(i + 1)? {
                    return Ok(Some(key));
                }
            }
            self.chosen.pop();
        }
        Ok(None)
    }

    fn test(&self) -> Result<Option<RecoveredKey>> {
        let m = self.public.modulus();
        let n_prime = ModMatrix::from_rows(self.chosen.clone(), m)?.transpose();
        let Ok(m_prime) = n_prime.inverse() else {
            return Ok(None);
        };
        let dst = &self.public.dst;
        let rows: Vec<RingElem> = m_prime.to_rows().iter().map(|r| dst.from_coeffs(r)).collect();
        for r in &rows {
            for v in [r.clone(), dst.neg(r)?] {
                if let Some(key) = try_generator(self.public, &rows, &v)? {
                    return Ok(Some(key));
                }
            }
        }
        Ok(None)
    }
}

const MAX_COMBINATION_ROWS: usize = 8;

/// Nonzero `{-1, 0, 1}`-combinations (sign-normalised) of the reduced rows
/// with sup-norm at most `2 beta`, keeping those with sup-norm at most `beta`.
fn short_combinations(reduced: &IntMatrix, beta: i128) -> Vec<Vec<i128>> {
    let Some(rows) = reduced.to_i128() else {
        return Vec::new();
    };
    let short: Vec<Vec<i128>> = rows
        .into_iter()
        .filter(|r| r.iter().map(|x| x.abs()).max().unwrap_or(0) <= 2 * beta)
        .take(MAX_COMBINATION_ROWS)
        .collect();
    let r = short.len();
    let k = reduced.ncols();
    let mut out = Vec::new();
    let mut coeffs = vec![0i8; r];
    // odometer over {-1, 0, 1}^r
    loop {
        let mut i = 0;
        while i < r && coeffs[i] == 1 {
            coeffs[i] = -1;
            i += 1;
        }
        if i == r {
            break;
        }
        coeffs[i] += 1;
        let Some(lead) = coeffs.iter().rev().find(|&&c| c != 0) else {
            continue;
        };
        if *lead < 0 {
            continue;
        }
        let mut v = vec![0i128; k];
        for (c, row) in coeffs.iter().zip(&short) {
            if *c != 0 {
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi += *c as i128 * ri;
                }
            }
        }
        let sup = v.iter().map(|x| x.abs()).max().unwrap_or(0);
        if sup > 0 && sup <= beta {
            out.push(v);
        }
    }
    out
}

fn independent_mod_p(vectors: &[Vec<i128>], m: Modulus) -> bool {
    let p = m.residue();
    let mut echelon: Vec<Vec<i128>> = Vec::new();
    for c in vectors {
        let mut v: Vec<i128> = c.iter().map(|&x| p.reduce(x)).collect();
        for e in &echelon {
            let col = e.iter().position(|&x| x != 0).expect("nonzero row");
            let f = v[col];
            if f != 0 {
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi = p.sub(*vi, p.mul(f, *ei));
                }
            }
        }
        let Some(col) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = p.inv(v[col]).expect("field");
        echelon.push(v.iter().map(|&x| p.mul(x, inv)).collect());
    }
    true
}

fn try_generator(public: &PublicInstance, rows: &[RingElem], v: &RingElem) -> Result<Option<RecoveredKey>> {
    let dst = &public.dst;
    let n = dst.degree();
    let mut used = vec![false; rows.len()];
    let mut pow = dst.one();
    let mut powers = Vec::with_capacity(n);
    for _ in 0..n {
        let neg = dst.neg(&pow)?;
        let Some(idx) = (0..rows.len()).find(|&i| !used[i] && (rows[i] == pow || rows[i] == neg)) else {
            return Ok(None);
        };
        used[idx] = true;
        powers.push(pow.clone());
        pow = dst.mul(&pow, v)?;
    }
    // `pow` is now v^n; express it in the basis v^0..v^{n-1}.
    let m_rows = ModMatrix::from_rows(powers.iter().map(|e| dst.to_vec(e)).collect(), dst.modulus())?;
    let Ok(n_mat) = m_rows.inverse() else {
        return Ok(None);
    };
    let c = n_mat.left_mul_vec(&dst.to_vec(&pow))?;
    let mut f: Vec<i128> = c.iter().map(|x| -x).collect();
    f.push(1);
    let f = Poly::new(f, dst.modulus());
    let Ok(src) = RingCtx::new(&f) else {
        return Ok(None);
    };
    let Ok(iso) = Isomorphism::from_image(src, dst.clone(), v.clone()) else {
        return Ok(None);
    };
    let preimages = public
        .images
        .iter()
        .map(|a| iso.apply_inverse(a))
        .collect::<Result<Vec<_>>>()?;
    if preimages.iter().any(|a| a.sup_norm() > public.beta) {
        return Ok(None);
    }
    Ok(Some(RecoveredKey { iso, preimages }))
}
