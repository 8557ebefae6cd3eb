use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use zetagcd::ff::{FfError, FieldDesc};
use zetagcd::groups::{
    self, CharpolyCensus, CharpolyView, Family, GroupError, GroupSpec, Sampling,
};
use zetagcd::pencil::{ClassifyMode, PencilDesc, PencilError, PencilFile};
use zetagcd::pipeline::{self, PipelineError, SUMMARY_CSV_HEADER};
use zetagcd::poly::{IntPoly, ModPoly, WeilPoly};
use zetagcd::torsion::{self, fixtures, BoundMode, CellComplex, TorsionError};
use zetagcd::variety::{self, VarietyError, VarietyFile};

mod schema;

/// Weil-polynomial gcd trials, classical group estimates and torsion bounds.
///
/// Every run is determined by its flags and input files.
#[derive(Parser, Debug)]
#[command(name = "zetagcd", version)]
struct RunConfig {
    /// Master seed; all randomness derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Point counts and the zeta numerator of a variety.
    Zeta(ZetaArgs),
    /// Scan and classify the singular fibres of a pencil.
    Pencil(PencilArgs),
    /// Two-fibre gcd trials over F_Q, one JSON line per trial.
    Gcd(GcdArgs),
    /// Recover the base-field polynomial from two extensions.
    Descend(DescendArgs),
    /// Class fractions in finite classical groups, as CSV.
    Estimate(EstimateArgs),
    /// Cohomology torsion of a cell complex, or the bound evaluators.
    Torsion(TorsionArgs),
    /// Print a bundled JSON schema.
    Schema {
        /// One of: zeta, counts, pencil, trial, weil, torsion, bound, prime, threshold.
        name: String,
    },
}

#[derive(Args, Debug)]
struct ZetaArgs {
    /// Variety file.
    file: PathBuf,
    /// Extension degrees to count over (repeatable).
    #[arg(short = 'k')]
    k: Vec<u32>,
    /// Only print point counts.
    #[arg(long)]
    count_only: bool,
    /// Genus of a smooth plane curve (default: from its degree).
    #[arg(long)]
    genus: Option<u32>,
}

#[derive(Args, Debug)]
struct PencilArgs {
    /// Pencil file, or a variety file with --random.
    file: PathBuf,
    /// Scan closed points of P^1 of degree up to this.
    #[arg(long, default_value_t = 2)]
    scan: u32,
    #[arg(long, default_value = "algebraic", value_parser = parse_mode)]
    mode: ClassifyMode,
    /// Draw a Lefschetz pencil on the variety from the master seed.
    #[arg(long)]
    random: bool,
    /// Pencil draws allowed with --random.
    #[arg(long, default_value_t = 64)]
    budget: usize,
}

#[derive(Args, Debug)]
struct GcdArgs {
    /// Pencil file.
    file: PathBuf,
    /// Extension degree w, with Q = q^w.
    #[arg(long, conflicts_with = "big_q")]
    w: Option<u32>,
    /// Field size Q (a power of the base field size).
    #[arg(long = "Q")]
    big_q: Option<u64>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Expected gcd: a JSON integer array or a WeilPoly object.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    scan: u32,
    /// Summary CSV destination (default: standard error).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DescendArgs {
    file: PathBuf,
    #[arg(long)]
    w1: u32,
    #[arg(long)]
    w2: u32,
    #[arg(long, default_value_t = 2)]
    scan: u32,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Sp, GSp, O or GO.
    #[arg(long, default_value = "Sp")]
    family: Family,
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, default_value_t = 3)]
    ell: u64,
    /// Multiplier of the coset.
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    /// Reversed characteristic polynomial, constant term first, e.g. "1 -2 1".
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Fraction of elements whose characteristic polynomial has distinct roots.
    #[arg(long)]
    distinct_roots: bool,
    /// Strip the forced eigenvalue of odd orthogonal similitudes.
    #[arg(long)]
    reduced: bool,
    /// Samples when the group is above the enumeration cap.
    #[arg(long, default_value_t = 20_000)]
    samples: u64,
    /// Pencil of plane cubics: compare traces of sampled fibres with the
    /// GSp(2) coset fraction.
    #[arg(long)]
    katz: Option<PathBuf>,
    /// Extension degree for --katz.
    #[arg(long, default_value_t = 20)]
    w: u32,
    /// Trace residues mod ell for --katz.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    residues: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    scan: u32,
}

#[derive(Args, Debug)]
struct TorsionArgs {
    /// Cell complex file.
    file: Option<PathBuf>,
    /// Bundled complex: rp2, klein, torus, s2, moore<n>.
    #[arg(long)]
    fixture: Option<String>,
    /// Bound evaluator: N d mode (real-affine, complex-projective, simple).
    #[arg(long, num_args = 3, value_names = ["N", "D", "MODE"])]
    bounds: Option<Vec<String>>,
    /// Torsion-free prime for degree d in P^N.
    #[arg(long, num_args = 2, value_names = ["D", "N"])]
    prime: Option<Vec<u64>>,
    /// Known torsion orders for --prime.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<BigUint>>,
    /// Extension-degree threshold: D N q.
    #[arg(long, num_args = 3, value_names = ["D", "N", "Q"])]
    threshold: Option<Vec<u64>>,
    /// Configured extension degree for --threshold.
    #[arg(long)]
    w: Option<u32>,
    /// Torsion-free prime in use, for --threshold.
    #[arg(long)]
    ell: Option<u64>,
}

fn parse_mode(s: &str) -> Result<ClassifyMode, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown mode {s:?}"))
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Budget(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Output(_) => 1,
        }
    }
}

fn input(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn from_ff(e: FfError) -> Failure {
    match e {
        FfError::EnumerationCapExceeded { .. } => Failure::Budget(e.to_string()),
        _ => input(e),
    }
}

fn from_variety(e: VarietyError) -> Failure {
    match e {
        VarietyError::Field(e) => from_ff(e),
        VarietyError::EnumerationCapExceeded { .. } => Failure::Budget(e.to_string()),
        _ => input(e),
    }
}

fn from_pencil(e: PencilError) -> Failure {
    match e {
        PencilError::Variety(e) => from_variety(e),
        PencilError::Field(e) => from_ff(e),
        PencilError::RejectionBudgetExceeded(_) | PencilError::NoPencilFound(_) => Failure::Budget(e.to_string()),
        _ => input(e),
    }
}

fn from_groups(e: GroupError) -> Failure {
    match e {
        GroupError::Pencil(e) => from_pencil(e),
        GroupError::Variety(e) => from_variety(e),
        GroupError::EnumerationCapExceeded { .. } | GroupError::ClosureCapExceeded(_) => Failure::Budget(e.to_string()),
        _ => input(e),
    }
}

fn from_pipeline(e: PipelineError) -> Failure {
    match e {
        PipelineError::Pencil(e) => from_pencil(e),
        PipelineError::Variety(e) => from_variety(e),
        PipelineError::NoConsistentMatching(_) => Failure::Budget(e.to_string()),
        PipelineError::Io(e) => Failure::Output(e.to_string()),
        _ => input(e),
    }
}

fn from_torsion(e: TorsionError) -> Failure {
    input(e)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_pencil(path: &Path) -> Result<PencilDesc, Failure> {
    let file: PencilFile = serde_json::from_str(&read(path)?).map_err(input)?;
    file.to_pencil().map_err(from_pencil)
}

/// Scans the pencil; a worse-than-nodal fibre is reported but kept.
fn scan(p: &mut PencilDesc, k: u32, mode: ClassifyMode) -> Result<(), Failure> {
    match p.scan_nodal_locus(k, mode) {
        Ok(_) => Ok(()),
        Err(PencilError::NotLefschetz(t)) => {
            eprintln!("warning: fibre {t:?} is worse than nodal; the pencil is not Lefschetz");
            Ok(())
        }
        Err(e) => Err(from_pencil(e)),
    }
}

fn field_for(p: &PencilDesc, w: Option<u32>, big_q: Option<u64>) -> Result<(u32, FieldDesc), Failure> {
    let q = p.base().size();
    let w = match (w, big_q) {
        (Some(w), _) => w,
        (None, Some(big_q)) => {
            let mut w = 0;
            let mut v = 1u64;
            while v < big_q {
                v = v.checked_mul(q).ok_or_else(|| input("Q is too large"))?;
                w += 1;
            }
            if v != big_q || w == 0 {
                return Err(input(format!("Q = {big_q} is not a power of q = {q}")));
            }
            w
        }
        (None, None) => return Err(input("one of --w or --Q is required")),
    };
    let pf = p.over(w).map_err(from_pencil)?;
    Ok((w, (**pf.desc()).clone()))
}

struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    fn new(path: &Option<PathBuf>) -> Result<Self, Failure> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(fs::File::create(p).map_err(|e| Failure::Output(format!("{}: {e}", p.display())))?),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Sink { out })
    }

    fn line(&mut self, s: &str) -> Result<(), Failure> {
        writeln!(self.out, "{s}").map_err(|e| Failure::Output(e.to_string()))
    }

    fn json<T: Serialize>(&mut self, v: &T) -> Result<(), Failure> {
        let s = serde_json::to_string(v).map_err(|e| Failure::Output(e.to_string()))?;
        self.line(&s)
    }
}

fn number(v: &BigUint) -> Value {
    match u64::try_from(v) {
        Ok(n) => json!(n),
        Err(_) => json!(v.to_string()),
    }
}

fn cmd_zeta(a: &ZetaArgs, sink: &mut Sink) -> Result<(), Failure> {
    let file: VarietyFile = serde_json::from_str(&read(&a.file)?).map_err(input)?;
    let v = file.to_variety().map_err(from_variety)?;
    if a.count_only || !v.is_plane_curve() {
        let ks = if a.k.is_empty() { vec![1] } else { a.k.clone() };
        let counts = variety::count_table(&v, &ks).map_err(from_variety)?;
        let counts: serde_json::Map<String, Value> = counts.into_iter().map(|(k, n)| (k.to_string(), json!(n))).collect();
        return sink.json(&json!({ "q": v.desc.size(), "counts": counts }));
    }
    let g = a.genus.unwrap_or_else(|| variety::genus_plane(v.degree()));
    let num = variety::curve_numerator(&v, g).map_err(from_variety)?;
    eprintln!("genus {g}, verified {}", num.verified);
    sink.json(&json!({ "numerator": num.poly, "q": num.q, "w": num.w }))
}

fn cmd_pencil(a: &PencilArgs, seed: u64, sink: &mut Sink) -> Result<(), Failure> {
    let (mut p, rejected) = if a.random {
        let file: VarietyFile = serde_json::from_str(&read(&a.file)?).map_err(input)?;
        let x = file.to_variety().map_err(from_variety)?;
        let (p, n) = PencilDesc::random_lefschetz(x, seed, a.scan, a.mode, a.budget).map_err(from_pencil)?;
        (p, Some(n))
    } else {
        (read_pencil(&a.file)?, None)
    };
    if p.scan.is_none() {
        scan(&mut p, a.scan, a.mode)?;
    }
    let summary = p.scan.clone().expect("scanned");
    let report = json!({
        "pencil": PencilFile::from_pencil(&p),
        "scan": summary,
        "euler_char_U": p.euler_char_u().map_err(from_pencil)?,
        "axis_exact": p.axis_exact,
        "rejected": rejected,
    });
    sink.json(&report)
}

fn read_target(path: &Path) -> Result<IntPoly, Failure> {
    let text = read(path)?;
    if let Ok(p) = serde_json::from_str::<IntPoly>(&text) {
        return Ok(p);
    }
    serde_json::from_str::<WeilPoly>(&text).map(|w| w.poly).map_err(input)
}

fn cmd_gcd(a: &GcdArgs, seed: u64, sink: &mut Sink) -> Result<(), Failure> {
    let mut p = read_pencil(&a.file)?;
    scan(&mut p, a.scan, ClassifyMode::Algebraic)?;
    let (w, q_desc) = field_for(&p, a.w, a.big_q)?;
    let target = a.target.as_deref().map(read_target).transpose()?;
    let th = pipeline::threshold(p.degree() as u64, p.ambient_dim() as u32, p.base().size(), None, Some(w));
    eprintln!("{}", serde_json::to_string(&th).expect("threshold serializes"));
    let e = pipeline::estimate_success(&p, &q_desc, a.trials, seed, target.as_ref()).map_err(from_pipeline)?;
    for r in &e.records {
        sink.json(r)?;
    }
    eprintln!("{} trials in {:.2?}", e.trials, e.wall);
    let csv = format!("{SUMMARY_CSV_HEADER}\n{}\n", pipeline::summary_csv_row(&e));
    match &a.summary {
        Some(path) => fs::write(path, csv).map_err(|e| Failure::Output(e.to_string())),
        None => {
            eprint!("{csv}");
            Ok(())
        }
    }
}

fn cmd_descend(a: &DescendArgs, seed: u64, sink: &mut Sink) -> Result<(), Failure> {
    let mut p = read_pencil(&a.file)?;
    scan(&mut p, a.scan, ClassifyMode::Algebraic)?;
    let r = pipeline::descend(&p, a.w1, a.w2, seed).map_err(from_pipeline)?;
    eprintln!("descended after {} attempt(s)", r.attempts);
    sink.json(&r.base)
}

fn cmd_estimate(a: &EstimateArgs, seed: u64, sink: &mut Sink) -> Result<(), Failure> {
    if let Some(path) = &a.katz {
        let mut p = read_pencil(path)?;
        scan(&mut p, a.scan, ClassifyMode::Algebraic)?;
        let (_, q_desc) = field_for(&p, Some(a.w), None)?;
        let r = groups::equidistribution_check(&p, a.ell, &q_desc, &a.residues, a.samples, seed).map_err(from_groups)?;
        sink.line("ell,Q,samples,hits,empirical,exact_numerator,exact_denominator,difference,katz_bound,sigma3,within")?;
        return sink.line(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.ell,
            r.big_q,
            r.samples,
            r.hits,
            r.empirical,
            r.exact_numerator,
            r.exact_denominator,
            r.difference,
            r.katz.value,
            r.sigma3,
            r.within
        ));
    }
    let spec = GroupSpec::new(a.family, a.s, a.ell).map_err(from_groups)?;
    let sampling = Sampling { samples: a.samples, seed };
    let census = CharpolyCensus::build(&spec, a.lambda, sampling).map_err(from_groups)?;
    let (f, frac) = match (&a.f, a.distinct_roots) {
        (Some(text), false) => {
            let coeffs: Vec<i64> = text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| input(format!("bad coefficient {t:?}"))))
                .collect::<Result<_, _>>()?;
            let f = ModPoly::from_i64(a.ell, &coeffs);
            let view = if a.reduced { CharpolyView::Reduced } else { CharpolyView::Full };
            let frac = census.coprime_fraction(&f, view).map_err(from_groups)?;
            (Some(f), frac)
        }
        (None, true) => (None, census.distinct_root_fraction()),
        _ => return Err(input("exactly one of --f or --distinct-roots is required")),
    };
    sink.line("group,lambda,f,numerator,denominator,exact,samples")?;
    sink.line(&groups::fraction_csv_row(&spec, a.lambda % a.ell, f.as_ref(), &frac))
}

fn fixture(name: &str) -> Result<CellComplex, Failure> {
    Ok(match name {
        "rp2" => fixtures::real_projective_plane(),
        "klein" => fixtures::klein_bottle(),
        "torus" => fixtures::torus(),
        "s2" => fixtures::sphere2(),
        _ => match name.strip_prefix("moore").and_then(|n| n.parse::<i64>().ok()) {
            Some(n) if n >= 1 => fixtures::moore_space(n),
            _ => return Err(input(format!("unknown fixture {name:?}"))),
        },
    })
}

fn cmd_torsion(a: &TorsionArgs, sink: &mut Sink) -> Result<(), Failure> {
    if let Some(b) = &a.bounds {
        let n: u32 = b[0].parse().map_err(input)?;
        let d: u64 = b[1].parse().map_err(input)?;
        let mode: BoundMode = b[2].parse().map_err(input)?;
        let r = torsion::betti_torsion_bound(n, d, mode).map_err(from_torsion)?;
        return sink.json(&r);
    }
    if let Some(pr) = &a.prime {
        let r = torsion::torsion_free_prime(a.orders.as_deref(), pr[0], pr[1] as u32);
        return sink.json(&r);
    }
    if let Some(t) = &a.threshold {
        let r = pipeline::threshold(t[0], t[1] as u32, t[2], a.ell, a.w);
        return sink.json(&r);
    }
    let k = match (&a.file, &a.fixture) {
        (Some(path), None) => torsion::parse_complex(&read(path)?).map_err(from_torsion)?,
        (None, Some(name)) => fixture(name)?,
        _ => return Err(input("give a complex file, --fixture, --bounds, --prime or --threshold")),
    };
    let mut out = serde_json::Map::new();
    let mut betti = Vec::new();
    for i in 0..=k.dim() {
        let h = k.cohomology(i).map_err(from_torsion)?;
        betti.push(h.betti);
        out.insert(format!("H{i}_torsion"), Value::Array(h.torsion.iter().map(number).collect()));
    }
    out.insert("betti".into(), json!(betti));
    sink.json(&Value::Object(out))
}

fn run(cfg: &RunConfig) -> Result<(), Failure> {
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(input)?;
    }
    let mut sink = Sink::new(&cfg.out)?;
    match &cfg.cmd {
        Cmd::Zeta(a) => cmd_zeta(a, &mut sink),
        Cmd::Pencil(a) => cmd_pencil(a, cfg.seed, &mut sink),
        Cmd::Gcd(a) => cmd_gcd(a, cfg.seed, &mut sink),
        Cmd::Descend(a) => cmd_descend(a, cfg.seed, &mut sink),
        Cmd::Estimate(a) => cmd_estimate(a, cfg.seed, &mut sink),
        Cmd::Torsion(a) => cmd_torsion(a, &mut sink),
        Cmd::Schema { name } => {
            let s = schema::get(name).ok_or_else(|| input(format!("unknown schema {name:?}; one of {}", schema::NAMES.join(", "))))?;
            sink.line(s.trim_end())
        }
    }?;
    sink.out.flush().map_err(|e| Failure::Output(e.to_string()))
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Input(m) | Failure::Budget(m) | Failure::Output(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
