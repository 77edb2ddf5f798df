use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, CommandFactory, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use padic_gz::format::{
    instance_to_toml, json_line, parse_instance, parse_record, record_text, InstanceFile, MeasureFile, DEFAULT_MAX_DEPTH,
};
use padic_gz::gz::{corrupt_rec, random_instance, verify_thm71, verify_thm91, GZInstance, RandomSpec, Verdict};
use padic_gz::lfactors::{
    case_table, epsilon_sq, exceptional_zero, local_l, parse_half, LValue, LocalCharCase, LocalRepCase, TorusKind,
};
use padic_gz::padic::{PadicScalar, QuadContext, QuadScalar};
use padic_gz::projline::mult_integral;

const MAX_PRECISION: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    /// line-delimited JSON records
    Json,
}

#[derive(Parser)]
#[command(name = "padic-gz", version, about = "Finite-model checks of exceptional-zero Gross-Zagier identities")]
struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplicative integral of (x - τ₂)/(x - τ₁) against a measure file
    Integrate {
        file: PathBuf,
        /// τ₁ as `a` or `a,b` meaning a + b√Δ
        #[arg(long, allow_hyphen_values = true)]
        tau1: String,
        #[arg(long, allow_hyphen_values = true)]
        tau2: String,
        /// Δ of K_p; defaults to the standard unramified one
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        /// p-adic precision, overriding the file
        #[arg(short = 'N', long)]
        precision: Option<u32>,
    },
    /// Local L-factor and ε² at a Steinberg prime
    #[command(group(ArgGroup::new("torus").args(["split", "inert", "ramified"])))]
    #[command(group(ArgGroup::new("sign").args(["st_plus", "st_minus"])))]
    Lfactor {
        #[arg(long)]
        split: bool,
        #[arg(long)]
        inert: bool,
        #[arg(long)]
        ramified: bool,
        /// Steinberg with sign +1 (default)
        #[arg(long = "steinberg+")]
        st_plus: bool,
        #[arg(long = "steinberg-")]
        st_minus: bool,
        /// χ(ω): `1`, `-1`, or `k:j` for ζ_k^j
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        chi_omega: String,
        /// s ∈ 1/2 + Z, e.g. `-1/2`
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        /// residue field size
        #[arg(long, default_value_t = 5)]
        q: i64,
        /// print every sign × torus × χ(ω) case at s = ±1/2
        #[arg(long, conflicts_with_all = ["torus", "sign", "s"])]
        table: bool,
    },
    /// Verify instance files; exit 0 iff every identity holds
    Verify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// verify this many files concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write a seeded random instance
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// number of primes in S (ignored with --primes)
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// primes of S, comma separated
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// bound on the class group order
        #[arg(long, default_value_t = 6)]
        cl: usize,
        /// bound on measure depth
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// bound on pure tensors per class
        #[arg(long, default_value_t = 2)]
        tensors: usize,
        /// add one S₋ prime carrying an ε-factor
        #[arg(long)]
        minus: bool,
        #[arg(short = 'N', long, default_value_t = 12)]
        precision: u32,
        /// apply a mutation for negative testing
        #[arg(long, value_enum)]
        mutate: Option<Mutation>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mutation {
    /// perturb one measure record so additivity fails
    Additivity,
    /// move one local reciprocity image
    Rec,
}

/// Input or invariant error: exit code 2.
struct InputError(anyhow::Error);

fn max_depth() -> Result<u32> {
    match std::env::var("PADIC_GZ_MAXDEPTH") {
        Ok(v) => v.trim().parse().with_context(|| format!("PADIC_GZ_MAXDEPTH={v}")),
        Err(_) => Ok(DEFAULT_MAX_DEPTH),
    }
}

fn check_precision(n: u32) -> Result<()> {
    if n == 0 || n > MAX_PRECISION {
        bail!("precision {n} outside 1..={MAX_PRECISION}");
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_quad(qctx: QuadContext, s: &str) -> Result<QuadScalar> {
    let k = qctx.base();
    let (a, b) = match s.split_once(',') {
        Some((a, b)) => (a, b),
        None => (s, "0"),
    };
    Ok(QuadScalar::new(qctx, PadicScalar::parse_text(k, a)?, PadicScalar::parse_text(k, b)?))
}

#[derive(Serialize)]
struct IntegralRecord {
    value: String,
    precision: i64,
}

fn cmd_integrate(
    fmt: OutputFormat,
    file: &Path,
    tau1: &str,
    tau2: &str,
    delta: Option<i64>,
    precision: Option<u32>,
) -> Result<u8, InputError> {
    let load = || -> Result<_> {
        let text = read(file)?;
        let mut mf: MeasureFile = toml::from_str(&text).with_context(|| file.display().to_string())?;
        if let Some(n) = precision {
            check_precision(n)?;
            mf.precision = n;
        }
        let mu = mf.to_measure(max_depth()?).with_context(|| file.display().to_string())?;
        let k = mu.ctx();
        let qctx = match delta {
            Some(d) => QuadContext::new(k, d)?,
            None => QuadContext::inert(k),
        };
        Ok((mu, parse_quad(qctx, tau1).context("--tau1")?, parse_quad(qctx, tau2).context("--tau2")?))
    };
    let (mu, t1, t2) = load().map_err(InputError)?;
    let v = mult_integral(&mu, &t1, &t2, None).map_err(|e| InputError(e.into()))?;
    let value = if mu.is_zero() { "1".to_string() } else { v.value.to_text() };
    match fmt {
        OutputFormat::Text => {
            println!("{value}");
            println!("precision {}", v.precision);
        }
        OutputFormat::Json => println!("{}", json_line("integral", &IntegralRecord { value, precision: v.precision })),
    }
    Ok(0)
}

fn parse_chi_omega(s: &str) -> Result<(u64, i64)> {
    match s.trim() {
        "1" => Ok((1, 0)),
        "-1" => Ok((2, 1)),
        t => {
            let (k, j) = t.split_once(':').ok_or_else(|| anyhow!("χ(ω) must be 1, -1 or k:j, got '{s}'"))?;
            let k: u64 = k.parse().context("root order")?;
            if k == 0 {
                bail!("root order must be positive");
            }
            Ok((k, j.parse().context("root exponent")?))
        }
    }
}

#[derive(Serialize)]
struct LRecord {
    rep: &'static str,
    torus: TorusKind,
    chi_omega: String,
    s: String,
    l: String,
    eps_sq: String,
    exceptional_zero: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_lfactor(
    fmt: OutputFormat,
    split: bool,
    inert: bool,
    st_minus: bool,
    chi_omega: &str,
    s: Option<&str>,
    q: i64,
    table: bool,
) -> Result<u8, InputError> {
    if table {
        let rows = case_table(q).map_err(|e| InputError(e.into()))?;
        for row in rows {
            match fmt {
                OutputFormat::Text => println!(
                    "{} {:?} chi(omega)={} s={} L={} eps^2={} exceptional_zero={}",
                    row.rep, row.torus, row.chi_omega, row.s, row.l, row.eps_sq, row.exceptional_zero
                ),
                OutputFormat::Json => println!("{}", json_line("lfactor", &row)),
            }
        }
        return Ok(0);
    }
    let torus = if split {
        TorusKind::Split
    } else if inert {
        TorusKind::Inert
    } else {
        TorusKind::Ramified
    };
    let (rep, rep_name) =
        if st_minus { (LocalRepCase::SteinbergMinus, "St-") } else { (LocalRepCase::SteinbergPlus, "St+") };
    let s = s.ok_or_else(|| InputError(anyhow!("--s is required without --table")))?;
    let run = || -> Result<LRecord> {
        let ch = LocalCharCase { torus, chi_omega: parse_chi_omega(chi_omega)?, conductor: 0, q, l_half: None };
        let s2 = parse_half(s)?;
        let ez = exceptional_zero(&rep, &ch);
        let l = match local_l(&rep, &ch, s2)? {
            LValue::Pole if ez => "pole (exceptional zero)".to_string(),
            v => v.to_text(),
        };
        Ok(LRecord {
            rep: rep_name,
            torus,
            chi_omega: chi_omega.to_string(),
            s: s.to_string(),
            l,
            eps_sq: epsilon_sq(&rep, &ch)?.to_text(),
            exceptional_zero: ez,
        })
    };
    let rec = run().map_err(InputError)?;
    match fmt {
        OutputFormat::Text => println!("{}", rec.l),
        OutputFormat::Json => println!("{}", json_line("lfactor", &rec)),
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerdictRecord<'a> {
    file: String,
    #[serde(flatten)]
    verdict: &'a Verdict,
}

#[derive(Serialize)]
struct ErrorRecord {
    file: String,
    error: String,
}

fn verify_file(path: &Path, cap: u32) -> Result<Verdict> {
    let text = read(path)?;
    let inst = parse_instance(&text, cap)?;
    let v = if inst.r() == 1 && inst.minus.is_empty() { verify_thm71(&inst)? } else { verify_thm91(&inst)? };
    Ok(v)
}

fn print_verdict(fmt: OutputFormat, file: &str, v: &Verdict) {
    match fmt {
        OutputFormat::Json => println!("{}", json_line("verdict", &VerdictRecord { file: file.into(), verdict: v })),
        OutputFormat::Text => {
            let status = if v.passed { "PASS" } else { "FAIL" };
            let deg = if v.squared { 2 * v.r } else { v.r };
            println!(
                "{status} {file}: {} identity, r={}, graded degree {deg}, index {}, mod {}",
                v.theorem, v.r, v.unit_index, v.coeff_modulus
            );
            if !v.passed {
                if let Some(note) = &v.note {
                    println!("  note: {note}");
                }
                for &i in &v.diff {
                    let get = |x: &[u64]| x.get(i).map_or("-".to_string(), |c| c.to_string());
                    println!("  coordinate {i}: lhs {} rhs {}", get(&v.lhs), get(&v.rhs));
                }
            }
        }
    }
}

fn cmd_verify(fmt: OutputFormat, files: &[PathBuf], jobs: usize) -> Result<u8, InputError> {
    let cap = max_depth().map_err(InputError)?;
    let jobs = jobs.max(1);
    let mut results: Vec<Option<Result<Verdict>>> = (0..files.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (chunk_files, chunk_out) in files.chunks(files.len().div_ceil(jobs)).zip(results.chunks_mut(files.len().div_ceil(jobs))) {
            scope.spawn(move || {
                for (f, out) in chunk_files.iter().zip(chunk_out) {
                    *out = Some(verify_file(f, cap));
                }
            });
        }
    });
    let mut code = 0u8;
    for (f, r) in files.iter().zip(results) {
        let name = f.display().to_string();
        match r.expect("every file verified") {
            Ok(v) => {
                print_verdict(fmt, &name, &v);
                if !v.passed {
                    code = code.max(1);
                }
            }
            Err(e) => {
                match fmt {
                    OutputFormat::Json => println!("{}", json_line("error", &ErrorRecord { file: name.clone(), error: format!("{e:#}") })),
                    OutputFormat::Text => println!("ERROR {name}"),
                }
                eprintln!("error: {name}: {e:#}");
                code = 2;
            }
        }
    }
    Ok(code)
}

/// Bump the first leaf record so the listed aggregates no longer add up.
fn break_additivity(file: &mut InstanceFile) -> Result<()> {
    for class in &mut file.measures {
        for t in &mut class.tensors {
            for f in &mut t.factors {
                let depth = f.depth;
                if let Some(rec) = f.records.iter_mut().find(|r| r.split_whitespace().nth(1) == Some(&depth.to_string())) {
                    let (d, m) = parse_record("", rec)?;
                    *rec = record_text(&d, m + 1);
                    return Ok(());
                }
            }
        }
    }
    bail!("instance has no measure records to mutate")
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    seed: u64,
    r: usize,
    primes: Option<Vec<u64>>,
    cl: usize,
    depth: u32,
    tensors: usize,
    minus: bool,
    precision: u32,
    mutate: Option<Mutation>,
    output: Option<&Path>,
) -> Result<u8, InputError> {
    let run = || -> Result<String> {
        check_precision(precision)?;
        let cap = max_depth()?;
        if depth > cap {
            bail!("depth {depth} above cap {cap} (PADIC_GZ_MAXDEPTH)");
        }
        let r = primes.as_ref().map_or(r, |ps| ps.len());
        let spec = RandomSpec { r, primes, precision, max_class: cl, max_depth: depth, max_tensors: tensors, with_minus: minus };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst: GZInstance = random_instance(&mut rng, &spec)?;
        if mutate == Some(Mutation::Rec) {
            inst = corrupt_rec(&inst).ok_or_else(|| anyhow!("no admissible rec mutation for this instance"))?;
        }
        let mut text = instance_to_toml(&inst);
        if mutate == Some(Mutation::Additivity) {
            let mut file = InstanceFile::from_instance(&inst);
            break_additivity(&mut file)?;
            text = toml::to_string(&file)?;
        }
        Ok(text)
    };
    let text = run().map_err(InputError)?;
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(InputError)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, InputError> {
    let fmt = cli.format;
    match cli.command {
        Command::Integrate { file, tau1, tau2, delta, precision } => cmd_integrate(fmt, &file, &tau1, &tau2, delta, precision),
        Command::Lfactor { split, inert, ramified, st_plus: _, st_minus, chi_omega, s, q, table } => {
            if !table && !(split || inert || ramified) {
                Cli::command()
                    .error(clap::error::ErrorKind::MissingRequiredArgument, "one of --split, --inert, --ramified is required")
                    .exit();
            }
            cmd_lfactor(fmt, split, inert, st_minus, &chi_omega, s.as_deref(), q, table)
        }
        Command::Verify { files, jobs } => cmd_verify(fmt, &files, jobs),
        Command::Gen { seed, r, primes, cl, depth, tensors, minus, precision, mutate, output } => {
            cmd_gen(seed, r, primes, cl, depth, tensors, minus, precision, mutate, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

