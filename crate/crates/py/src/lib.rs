//! Python bindings. Ring elements cross the boundary as lists of centered
//! coefficients, lowest degree first.

use griforge::crt::{build_composite_iso, crt_combine_polys, CompositeCtx, CompositeIsomorphism};
use griforge::format::{InstanceFile, ParamFile};
use griforge::gri::{self, GriParams, RandomGuess, SecretOracle};
use griforge::gring::{self, RingCtx};
use griforge::lattice::{self, default_delta};
use griforge::poly::Poly;
use griforge::zmod;
use num_rational::Rational64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

create_exception!(pygriforge, GriforgeError, PyValueError);

fn err(e: griforge::Error) -> PyErr {
    GriforgeError::new_err(e.to_string())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn delta_from(delta: Option<(i64, i64)>) -> PyResult<Rational64> {
    match delta {
        None => Ok(default_delta()),
        Some((_, 0)) => Err(GriforgeError::new_err("delta denominator is zero")),
        Some((num, den)) => Ok(Rational64::new(num, den)),
    }
}

#[pyfunction]
fn is_prime(n: u64) -> bool {
    zmod::is_prime(n)
}

/// Galois ring GR(p^s, n) = (Z/p^sZ)[x]/(f).
#[pyclass(name = "GaloisRing", frozen, from_py_object, module = "pygriforge")]
#[derive(Clone)]
struct PyGaloisRing {
    ctx: RingCtx,
}

#[pymethods]
impl PyGaloisRing {
    /// `f` is monic, lowest degree first, and irreducible mod p.
    #[new]
    fn new(p: u64, s: u32, f: Vec<i128>) -> PyResult<Self> {
        let m = zmod::Modulus::new(p, s).map_err(err)?;
        let ctx = RingCtx::new(&Poly::new(f, m)).map_err(err)?;
        Ok(Self { ctx })
    }

    #[staticmethod]
    #[pyo3(signature = (p, s, n, seed=0))]
    fn random(p: u64, s: u32, n: usize, seed: u64) -> PyResult<Self> {
        let m = zmod::Modulus::new(p, s).map_err(err)?;
        let f = Poly::random_monic_irreducible(m, n, &mut rng(seed)).map_err(err)?;
        Ok(Self {
            ctx: RingCtx::new(&f).map_err(err)?,
        })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.ctx.modulus().p()
    }

    #[getter]
    fn s(&self) -> u32 {
        self.ctx.modulus().s()
    }

    #[getter]
    fn n(&self) -> usize {
        self.ctx.degree()
    }

    #[getter]
    fn modulus(&self) -> i128 {
        self.ctx.modulus().value()
    }

    #[getter]
    fn defining_poly(&self) -> Vec<i128> {
        self.ctx.defining_poly().coeffs().to_vec()
    }

    fn reduce(&self, a: Vec<i128>) -> Vec<i128> {
        self.ctx.to_vec(&self.ctx.from_coeffs(&a))
    }

    fn add(&self, a: Vec<i128>, b: Vec<i128>) -> PyResult<Vec<i128>> {
        self.binary(a, b, RingCtx::add)
    }

    fn sub(&self, a: Vec<i128>, b: Vec<i128>) -> PyResult<Vec<i128>> {
        self.binary(a, b, RingCtx::sub)
    }

    fn mul(&self, a: Vec<i128>, b: Vec<i128>) -> PyResult<Vec<i128>> {
        self.binary(a, b, RingCtx::mul)
    }

    fn inv(&self, a: Vec<i128>) -> PyResult<Vec<i128>> {
        let r = self.ctx.inv(&self.ctx.from_coeffs(&a)).map_err(err)?;
        Ok(self.ctx.to_vec(&r))
    }

    fn is_unit(&self, a: Vec<i128>) -> bool {
        self.ctx.is_unit(&self.ctx.from_coeffs(&a))
    }

    #[pyo3(signature = (seed=0))]
    fn random_element(&self, seed: u64) -> Vec<i128> {
        self.ctx.to_vec(&self.ctx.random(&mut rng(seed)))
    }

    fn __repr__(&self) -> String {
        format!(
            "GaloisRing(p={}, s={}, f={})",
            self.p(),
            self.s(),
            self.ctx.defining_poly()
        )
    }
}

impl PyGaloisRing {
    fn binary(
        &self,
        a: Vec<i128>,
        b: Vec<i128>,
        op: fn(&RingCtx, &gring::RingElem, &gring::RingElem) -> griforge::Result<gring::RingElem>,
    ) -> PyResult<Vec<i128>> {
        let r = op(&self.ctx, &self.ctx.from_coeffs(&a), &self.ctx.from_coeffs(&b)).map_err(err)?;
        Ok(self.ctx.to_vec(&r))
    }
}

/// Explicit isomorphism between two presentations of the same Galois ring.
#[pyclass(name = "RingIsomorphism", frozen, skip_from_py_object, module = "pygriforge")]
#[derive(Clone)]
struct PyRingIsomorphism {
    iso: gring::Isomorphism,
}

#[pymethods]
impl PyRingIsomorphism {
    #[staticmethod]
    #[pyo3(signature = (src, dst, seed=0))]
    fn build(src: &PyGaloisRing, dst: &PyGaloisRing, seed: u64) -> PyResult<Self> {
        let iso = gring::build_ring_iso(&src.ctx, &dst.ctx, &mut rng(seed)).map_err(err)?;
        Ok(Self { iso })
    }

    #[staticmethod]
    fn from_image(src: &PyGaloisRing, dst: &PyGaloisRing, phi_x: Vec<i128>) -> PyResult<Self> {
        let image = dst.ctx.from_coeffs(&phi_x);
        let iso = gring::Isomorphism::from_image(src.ctx.clone(), dst.ctx.clone(), image).map_err(err)?;
        Ok(Self { iso })
    }

    #[getter]
    fn src(&self) -> PyGaloisRing {
        PyGaloisRing {
            ctx: self.iso.src().clone(),
        }
    }

    #[getter]
    fn dst(&self) -> PyGaloisRing {
        PyGaloisRing {
            ctx: self.iso.dst().clone(),
        }
    }

    #[getter]
    fn image_of_x(&self) -> Vec<i128> {
        self.iso.dst().to_vec(self.iso.image_of_x())
    }

    fn forward_matrix(&self) -> Vec<Vec<i128>> {
        self.iso.forward_matrix().to_rows()
    }

    fn backward_matrix(&self) -> Vec<Vec<i128>> {
        self.iso.backward_matrix().to_rows()
    }

    fn apply(&self, a: Vec<i128>) -> PyResult<Vec<i128>> {
        let r = self.iso.apply(&self.iso.src().from_coeffs(&a)).map_err(err)?;
        Ok(self.iso.dst().to_vec(&r))
    }

    fn apply_inverse(&self, a: Vec<i128>) -> PyResult<Vec<i128>> {
        let r = self.iso.apply_inverse(&self.iso.dst().from_coeffs(&a)).map_err(err)?;
        Ok(self.iso.src().to_vec(&r))
    }
}

/// A GRI instance: k images under a secret isomorphism of short preimages.
#[pyclass(name = "GriInstance", frozen, skip_from_py_object, module = "pygriforge")]
#[derive(Clone)]
struct PyGriInstance {
    inst: gri::GriInstance,
    seed: Option<u64>,
}

#[pymethods]
impl PyGriInstance {
    #[staticmethod]
    #[pyo3(signature = (p, s, n, beta, k, seed=0))]
    fn generate(p: u64, s: u32, n: usize, beta: i128, k: usize, seed: u64) -> PyResult<Self> {
        let params = GriParams { p, s, n, beta, k };
        let inst = gri::gen_instance(&params, &mut rng(seed)).map_err(err)?;
        Ok(Self {
            inst,
            seed: Some(seed),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (iso, beta, k, seed=0))]
    fn sample(iso: &PyRingIsomorphism, beta: i128, k: usize, seed: u64) -> PyResult<Self> {
        let inst = gri::sample_instance(iso.iso.clone(), beta, k, &mut rng(seed)).map_err(err)?;
        Ok(Self {
            inst,
            seed: Some(seed),
        })
    }

    /// Parses a full instance file (with secrets).
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let file = InstanceFile::parse(text).map_err(err)?;
        Ok(Self {
            inst: file.instance().map_err(err)?,
            seed: file.seed,
        })
    }

    #[pyo3(signature = (public_only=false))]
    fn to_text(&self, public_only: bool) -> String {
        InstanceFile::from_instance(&self.inst, self.seed).to_text(public_only)
    }

    #[getter]
    fn beta(&self) -> i128 {
        self.inst.beta()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inst.public.k()
    }

    #[getter]
    fn images(&self) -> Vec<Vec<i128>> {
        let dst = &self.inst.public.dst;
        self.inst.public.images.iter().map(|a| dst.to_vec(a)).collect()
    }

    #[getter]
    fn preimages(&self) -> Vec<Vec<i128>> {
        let src = self.inst.secret.src();
        self.inst.secret.preimages.iter().map(|a| src.to_vec(a)).collect()
    }

    #[getter]
    fn isomorphism(&self) -> PyRingIsomorphism {
        PyRingIsomorphism {
            iso: self.inst.secret.iso.clone(),
        }
    }

    fn verify(&self) -> PyResult<()> {
        self.inst.verify().map_err(err)
    }

    /// Success rate of a distinguisher ("random" or "oracle") on fresh challenges.
    #[pyo3(signature = (strategy="random", trials=1000, seed=0))]
    fn distinguish(&self, py: Python<'_>, strategy: &str, trials: usize, seed: u64) -> PyResult<AdvantageReport> {
        let report = py
            .detach(|| match strategy {
                "random" => Some(gri::run_distinguisher_experiment(&self.inst, &RandomGuess, trials, seed)),
                "oracle" => Some(gri::run_distinguisher_experiment(
                    &self.inst,
                    &SecretOracle::new(&self.inst),
                    trials,
                    seed,
                )),
                _ => None,
            })
            .ok_or_else(|| GriforgeError::new_err(format!("unknown strategy `{strategy}`")))?
            .map_err(err)?;
        Ok(AdvantageReport {
            trials: report.trials,
            successes: report.successes,
            rate: report.rate,
            wilson_low: report.wilson_low,
            wilson_high: report.wilson_high,
        })
    }
}

#[pyclass(frozen, get_all, module = "pygriforge")]
struct AdvantageReport {
    trials: usize,
    successes: usize,
    rate: f64,
    wilson_low: f64,
    wilson_high: f64,
}

#[pyclass(frozen, get_all, module = "pygriforge")]
struct AttackReport {
    lattice_rank: usize,
    gaussian_heuristic: f64,
    first_vector_norm: f64,
    candidates: Vec<Vec<i128>>,
    verified: Vec<bool>,
    recovered_phi_x: Option<Vec<i128>>,
    recovered_f: Option<Vec<i128>>,
    text: String,
}

#[pymethods]
impl AttackReport {
    fn __str__(&self) -> String {
        self.text.clone()
    }
}

/// Lattice attack on the public half of an instance. `delta` is a fraction
/// (num, den), default 99/100.
#[pyfunction]
#[pyo3(signature = (instance, delta=None))]
fn attack(py: Python<'_>, instance: &PyGriInstance, delta: Option<(i64, i64)>) -> PyResult<AttackReport> {
    let delta = delta_from(delta)?;
    let report = py
        .detach(|| lattice::run_attack(&instance.inst.public, delta))
        .map_err(err)?;
    let recovered = report.recovered.as_ref();
    Ok(AttackReport {
        lattice_rank: report.lattice_rank,
        gaussian_heuristic: report.gaussian_heuristic,
        first_vector_norm: report.first_vector_norm,
        candidates: report.candidates.iter().map(|c| c.vector.clone()).collect(),
        verified: report.candidates.iter().map(|c| c.in_lattice).collect(),
        recovered_phi_x: recovered.map(|r| r.iso.dst().to_vec(r.iso.image_of_x())),
        recovered_f: recovered.map(|r| r.iso.src().defining_poly().coeffs().to_vec()),
        text: report.render(),
    })
}

/// Combines monic polynomials over coprime Z/p_i^s_i into one over Z/mZ.
/// Returns (coefficients, m).
#[pyfunction]
fn crt_combine(polys: Vec<(u64, u32, Vec<i128>)>) -> PyResult<(Vec<i128>, i128)> {
    let polys = polys
        .into_iter()
        .map(|(p, s, c)| Ok(Poly::new(c, zmod::Modulus::new(p, s)?)))
        .collect::<griforge::Result<Vec<_>>>()
        .map_err(err)?;
    let combined = crt_combine_polys(&polys).map_err(err)?;
    Ok((combined.coeffs().to_vec(), combined.modulus()))
}

/// Componentwise isomorphism between composite rings.
#[pyclass(name = "CompositeIsomorphism", frozen, module = "pygriforge")]
struct PyCompositeIsomorphism {
    iso: CompositeIsomorphism,
}

#[pymethods]
impl PyCompositeIsomorphism {
    #[staticmethod]
    #[pyo3(signature = (src, dst, seed=0))]
    fn build(src: Vec<PyGaloisRing>, dst: Vec<PyGaloisRing>, seed: u64) -> PyResult<Self> {
        let src = CompositeCtx::new(src.into_iter().map(|r| r.ctx).collect()).map_err(err)?;
        let dst = CompositeCtx::new(dst.into_iter().map(|r| r.ctx).collect()).map_err(err)?;
        let iso = build_composite_iso(&src, &dst, &mut rng(seed)).map_err(err)?;
        Ok(Self { iso })
    }

    #[getter]
    fn modulus(&self) -> i128 {
        self.iso.dst().modulus()
    }

    #[getter]
    fn image_of_x(&self) -> Vec<i128> {
        self.iso.image_of_x().coeffs().to_vec()
    }

    fn apply(&self, a: Vec<i128>) -> PyResult<Vec<i128>> {
        let r = self.iso.apply(&self.iso.src().elem(&a)).map_err(err)?;
        Ok(r.coeffs().to_vec())
    }

    fn apply_inverse(&self, a: Vec<i128>) -> PyResult<Vec<i128>> {
        let r = self.iso.apply_inverse(&self.iso.dst().elem(&a)).map_err(err)?;
        Ok(r.coeffs().to_vec())
    }
}

/// Public defining polynomial F from a parameter file; secrets are ignored.
#[pyfunction]
fn load_public_params(text: &str) -> PyResult<PyGaloisRing> {
    let pf = ParamFile::parse_public(text).map_err(err)?;
    Ok(PyGaloisRing { ctx: pf.dst })
}

#[pymodule]
fn pygriforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GriforgeError", m.py().get_type::<GriforgeError>())?;
    m.add_class::<PyGaloisRing>()?;
    m.add_class::<PyRingIsomorphism>()?;
    m.add_class::<PyGriInstance>()?;
    m.add_class::<PyCompositeIsomorphism>()?;
    m.add_class::<AdvantageReport>()?;
    m.add_class::<AttackReport>()?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(attack, m)?)?;
    m.add_function(wrap_pyfunction!(crt_combine, m)?)?;
    m.add_function(wrap_pyfunction!(load_public_params, m)?)?;
    Ok(())
}
