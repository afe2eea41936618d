use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use griforge::crt::{CompositeCtx, CompositeIsomorphism};
use griforge::format::{CompositeFile, InstanceFile, ParamFile, INSTANCE_KIND, PARAMS_KIND};
use griforge::gri::{
    run_distinguisher_experiment, sample_instance, ChiBeta, GriInstance, RandomGuess, SecretOracle,
};
use griforge::gring::{build_ring_iso, RingCtx};
use griforge::lattice::{default_delta, run_attack};
use griforge::poly::Poly;
use griforge::zmod::Modulus;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "griforge", version, about = "Galois ring isomorphisms and the GRI problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw independent monic irreducible f (secret) and F (public).
    GenParams(GenParams),
    /// Construct an isomorphism from the parameter file's f to F.
    MakeIso(MakeIso),
    /// Sample a GRI instance: k images of short preimages.
    Sample(Sample),
    /// Run the lattice attack on a (public) instance file.
    Attack(Attack),
    /// Measure a distinguisher on fresh decisional challenges.
    Distinguish(Distinguish),
    /// Combine parameter files with coprime characteristics.
    CrtCombine(CrtCombine),
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit every secret.* field.
    #[arg(long)]
    public_only: bool,
}

#[derive(Args)]
struct Seed {
    /// RNG seed; falls back to GRIFORGE_SEED, then to the input file's seed, then 0.
    #[arg(long, env = "GRIFORGE_SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenParams {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    s: u32,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: Option<i128>,
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    seed: Seed,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct MakeIso {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    seed: Seed,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Sample {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    beta: Option<i128>,
    #[command(flatten)]
    seed: Seed,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Attack {
    #[arg(long = "in")]
    input: PathBuf,
    /// Lovász parameter, as a decimal (0.99) or fraction (99/100).
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Random,
    Oracle,
}

#[derive(Args)]
struct Distinguish {
    /// A full instance file, or a parameter file with a key.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "random")]
    strategy: Strategy,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    beta: Option<i128>,
    #[command(flatten)]
    seed: Seed,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CrtCombine {
    /// Parameter files, one per component.
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Usage(String),
    Validation(String),
    Invariant(String),
}

impl From<griforge::Error> for Failure {
    fn from(e: griforge::Error) -> Self {
        match e {
            griforge::Error::InvariantBreach(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rng_for(seed: &Seed, file_seed: Option<u64>) -> (u64, ChaCha8Rng) {
    let s = seed.seed.or(file_seed).unwrap_or(0);
    (s, ChaCha8Rng::seed_from_u64(s))
}

fn parse_delta(text: Option<&str>) -> CliResult<Rational64> {
    let Some(t) = text else {
        return Ok(default_delta());
    };
    let bad = || Failure::Usage(format!("cannot parse delta `{t}`"));
    if t.contains('/') {
        return t.parse().map_err(|_| bad());
    }
    let (whole, frac) = t.split_once('.').unwrap_or((t, ""));
    if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10i64.pow(frac.len() as u32);
    let num: i64 = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    Ok(Rational64::new(num, den))
}

fn file_kind(text: &str) -> Option<&str> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty())?;
    first.strip_prefix("format:")?.split_whitespace().next()
}

fn gen_params(a: &GenParams) -> CliResult<()> {
    let m = Modulus::new(a.p, a.s)?;
    if a.n == 0 {
        return Err(Failure::Validation("n must be at least 1".into()));
    }
    if let Some(b) = a.beta {
        ChiBeta::new(b, a.n, m)?;
    }
    if a.k == Some(0) {
        return Err(Failure::Validation("k must be at least 1".into()));
    }
    let (seed, mut rng) = rng_for(&a.seed, None);
    let f = Poly::random_monic_irreducible(m, a.n, &mut rng)?;
    let big_f = Poly::random_monic_irreducible(m, a.n, &mut rng)?;
    let pf = ParamFile {
        dst: RingCtx::new(&big_f)?,
        src: Some(RingCtx::new(&f)?),
        iso: None,
        beta: a.beta,
        k: a.k,
        seed: Some(seed),
    };
    emit(&pf.to_text(a.output.public_only), a.output.out.as_deref())
}

fn make_iso(a: &MakeIso) -> CliResult<()> {
    let mut pf = ParamFile::parse(&read(&a.input)?)?;
    let src = pf
        .src
        .clone()
        .ok_or_else(|| Failure::Validation("parameter file has no secret.f".into()))?;
    let (_, mut rng) = rng_for(&a.seed, pf.seed);
    let iso = build_ring_iso(&src, &pf.dst, &mut rng)?;
    let check = pf.dst.eval(src.defining_poly(), iso.image_of_x())?;
    if !check.is_zero() {
        return Err(Failure::Invariant("f(phi_x) != 0 after construction".into()));
    }
    pf.iso = Some(iso);
    emit(&pf.to_text(a.output.public_only), a.output.out.as_deref())
}

fn keyed_params(pf: &ParamFile, rng: &mut ChaCha8Rng) -> CliResult<griforge::gring::Isomorphism> {
    match (&pf.iso, &pf.src) {
        (Some(iso), _) => Ok(iso.clone()),
        (None, Some(src)) => Ok(build_ring_iso(src, &pf.dst, rng)?),
        (None, None) => Err(Failure::Validation("parameter file carries no key (secret.f)".into())),
    }
}

fn sample(a: &Sample) -> CliResult<()> {
    let pf = ParamFile::parse(&read(&a.input)?)?;
    let k = a.k.or(pf.k).ok_or_else(|| Failure::Usage("--k is required".into()))?;
    let beta = a.beta.or(pf.beta).ok_or_else(|| Failure::Usage("--beta is required".into()))?;
    let (seed, mut rng) = rng_for(&a.seed, pf.seed);
    let iso = keyed_params(&pf, &mut rng)?;
    let inst = sample_instance(iso, beta, k, &mut rng)?;
    let file = InstanceFile::from_instance(&inst, Some(seed));
    emit(&file.to_text(a.output.public_only), a.output.out.as_deref())
}

fn attack(a: &Attack) -> CliResult<()> {
    let file = InstanceFile::parse_public(&read(&a.input)?)?;
    let report = run_attack(&file.public, parse_delta(a.delta.as_deref())?)?;
    emit(&report.render(), a.out.as_deref())
}

fn distinguish(a: &Distinguish) -> CliResult<()> {
    let text = read(&a.input)?;
    let (seed, inst): (u64, GriInstance) = match file_kind(&text) {
        Some(INSTANCE_KIND) => {
            let file = InstanceFile::parse(&text)?;
            let (seed, _) = rng_for(&a.seed, file.seed);
            (seed, file.instance()?)
        }
        Some(PARAMS_KIND) => {
            let pf = ParamFile::parse(&text)?;
            let beta = a.beta.or(pf.beta).ok_or_else(|| Failure::Usage("--beta is required".into()))?;
            let (seed, mut rng) = rng_for(&a.seed, pf.seed);
            let iso = keyed_params(&pf, &mut rng)?;
            (seed, sample_instance(iso, beta, 1, &mut rng)?)
        }
        _ => return Err(Failure::Validation("expected an instance or parameter file".into())),
    };
    let (name, report) = match a.strategy {
        Strategy::Random => ("random", run_distinguisher_experiment(&inst, &RandomGuess, a.trials, seed)?),
        Strategy::Oracle => (
            "oracle",
            run_distinguisher_experiment(&inst, &SecretOracle::new(&inst), a.trials, seed)?,
        ),
    };
    let mut s = String::from("format: griforge-advantage v1\n");
    let _ = writeln!(s, "strategy: {name}");
    let _ = writeln!(s, "seed: {seed}");
    let _ = writeln!(s, "trials: {}", report.trials);
    let _ = writeln!(s, "successes: {}", report.successes);
    let _ = writeln!(s, "rate: {:.6}", report.rate);
    let _ = writeln!(s, "wilson_low: {:.6}", report.wilson_low);
    let _ = writeln!(s, "wilson_high: {:.6}", report.wilson_high);
    emit(&s, a.out.as_deref())
}

fn crt_combine(a: &CrtCombine) -> CliResult<()> {
    let files = a
        .inputs
        .iter()
        .map(|p| Ok(ParamFile::parse(&read(p)?)?))
        .collect::<CliResult<Vec<_>>>()?;
    let dst = CompositeCtx::new(files.iter().map(|f| f.dst.clone()).collect())?;
    let iso = if files.iter().all(|f| f.iso.is_some()) {
        let src = CompositeCtx::new(files.iter().filter_map(|f| f.src.clone()).collect())?;
        let parts = files.iter().filter_map(|f| f.iso.clone()).collect();
        Some(CompositeIsomorphism::from_parts(src, dst.clone(), parts)?)
    } else {
        None
    };
    let file = CompositeFile { dst, iso };
    emit(&file.to_text(a.output.public_only), a.output.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenParams(a) => gen_params(a),
        Command::MakeIso(a) => make_iso(a),
        Command::Sample(a) => sample(a),
        Command::Attack(a) => attack(a),
        Command::Distinguish(a) => distinguish(a),
        Command::CrtCombine(a) => crt_combine(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(4)
        }
    }
}
