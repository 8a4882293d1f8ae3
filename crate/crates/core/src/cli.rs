//! Batch driver: one subcommand per pipeline, JSON-lines reports with a ledger of
//! runtime-checked inequalities. Exit code 0 iff every ledger entry passed.

use crate::error::{invalid, Error, Result};
use crate::fourier::{roth_iterate, strong_decompose, structured_count_chain, weak_decompose};
use crate::generators::{generate_function, generate_set, GeneratorSpec};
use crate::gowers::{self, CountMethod};
use crate::graph::{
    box2_norm, box3_norm, cayley_3hypergraph, cayley_tripartite, strong_regularize, triangle_form,
    triangle_removal, weak_regularize, EdgeFunction,
};
use crate::primes::{fourier_bias, mangoldt_weights, prime_ap_average_with};
use crate::report::Check;
use crate::{CyclicFunction, GrowthFunction};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_LEDGER_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "szlab",
    version,
    about = "Structure-versus-randomness experiments"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "SZLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// File of `key=value` lines mirroring the long flags of the subcommand.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Omit wall-clock timings so reports are byte-reproducible.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timings: bool,
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// U², U³ of a function on Z/N; box norms of graphs and Cayley hypergraphs.
    Norms(NormsArgs),
    /// The k-term progression form, naive and/or spectral.
    CountAps(CountArgs),
    /// Weak or strong Fourier decomposition, or the structured counting chain.
    Decompose(DecomposeArgs),
    /// Density-increment pipeline on a subset of [1, L].
    Roth(RothArgs),
    /// Graph regularity, triangle removal and Cayley correspondences.
    Regularity(RegularityArgs),
    /// W-tricked von Mangoldt averages and Fourier bias.
    Primes(PrimesArgs),
    /// Emit fixture sets or functions.
    Generate(GenerateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norms(_) => "norms",
            Command::CountAps(_) => "count-aps",
            Command::Decompose(_) => "decompose",
            Command::Roth(_) => "roth",
            Command::Regularity(_) => "regularity",
            Command::Primes(_) => "primes",
            Command::Generate(_) => "generate",
        }
    }
}

/// A function on Z/N, generated or loaded from an `index,re,im` CSV.
#[derive(Args, Debug, Serialize)]
pub struct FunctionSource {
    /// Generator spec, e.g. `quadratic_phase:xi=1` or `random:delta=0.5`.
    #[arg(long)]
    pub gen: Option<GeneratorSpec>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// `index,re,im` CSV.
    #[arg(long)]
    pub values: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct NormsArgs {
    #[command(flatten)]
    pub source: FunctionSource,
    /// Undirected edge list (`u v [weight]`) for the box norm.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Build the Cayley 3-hypergraph of the set and report its box norm.
    #[arg(long)]
    pub cayley3: bool,
    /// Set members, one integer per line.
    #[arg(long)]
    pub set_file: Option<PathBuf>,
    /// Skip U³ above this modulus.
    #[arg(long, default_value_t = 20_000)]
    pub u3_max: usize,
    /// Skip the direct O(N²) U² above this modulus.
    #[arg(long, default_value_t = 1 << 15)]
    pub direct_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Naive,
    Spectral,
    Both,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct CountArgs {
    #[command(flatten)]
    pub source: FunctionSource,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecomposeMode {
    Weak,
    Strong,
    Chain,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: FunctionSource,
    #[arg(long, value_enum, default_value_t = DecomposeMode::Strong)]
    pub mode: DecomposeMode,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Growth function: poly:p, exp:b, shift:c or scaled_exp:s:b.
    #[arg(long, default_value = "exp:2")]
    pub growth: GrowthFunction,
    /// Density lower bound for the counting chain (default: the mean).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Write the structured part as `index,re,im` CSV.
    #[arg(long)]
    pub structured_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct RothArgs {
    /// Set generator spec.
    #[arg(long)]
    pub gen: Option<GeneratorSpec>,
    #[arg(long)]
    pub set_file: Option<PathBuf>,
    #[arg(long = "L")]
    pub l: u64,
    /// Density parameter (default: the measured density).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.15)]
    pub eta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegularityMode {
    Weak,
    Strong,
    Removal,
    Count,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct RegularityArgs {
    /// Undirected edge list (`u v [weight]`).
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Use the tripartite Cayley graph of a set mod N.
    #[arg(long)]
    pub cayley: bool,
    /// Also build the 4-partite Cayley hypergraph and count tetrahedra.
    #[arg(long)]
    pub cayley3: bool,
    #[arg(long)]
    pub set_file: Option<PathBuf>,
    #[arg(long)]
    pub gen: Option<GeneratorSpec>,
    /// Modulus for Cayley constructions (default: largest member + 1).
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Default: `removal` when --delta is given, `count` for Cayley inputs, else `weak`.
    #[arg(long, value_enum)]
    pub mode: Option<RegularityMode>,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, default_value = "shift:4")]
    pub growth: GrowthFunction,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
    #[arg(long)]
    pub removal_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct PrimesArgs {
    /// One or more interval lengths, comma separated; one report line each.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 7)]
    pub w: u64,
    #[arg(long, default_value_t = 1)]
    pub b: u64,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = MethodChoice::Spectral)]
    pub method: MethodChoice,
    /// Only the mean of the weights, no progression average.
    #[arg(long)]
    pub mean_only: bool,
    /// Also report the largest nonzero Fourier coefficients.
    #[arg(long)]
    pub bias: bool,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
pub struct GenerateArgs {
    #[arg(long)]
    pub gen: GeneratorSpec,
    /// Length of [1, L] for sets, or modulus for functions.
    #[arg(long = "L")]
    pub l: u64,
    /// Write members (one per line) or `index,re,im` CSV here.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub subcommand: &'static str,
    pub config: Value,
    pub results: Value,
    pub ledger: Vec<Check>,
    pub all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    pub artifacts: Vec<String>,
}

struct Outcome {
    results: Value,
    ledger: Vec<Check>,
    artifacts: Vec<String>,
}

impl Outcome {
    fn new(results: Value) -> Self {
        Self {
            results,
            ledger: Vec::new(),
            artifacts: Vec::new(),
        }
    }
}

/// Inserts the `key=value` pairs of `--config FILE` right after the subcommand name, so
/// explicit flags given later on the command line take precedence.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = Some(
                strs.get(i + 1)
                    .cloned()
                    .ok_or_else(|| invalid("--config needs a path"))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path)?;
    let mut extra: Vec<OsString> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{path}:{}: expected key=value", lineno + 1)))?;
        let key = k.trim();
        let flag = if key.len() == 1 && key.chars().all(|c| c.is_ascii_uppercase()) {
            format!("--{key}")
        } else {
            format!("--{}", key.replace('_', "-"))
        };
        match v.trim() {
            "true" => extra.push(flag.into()),
            "false" => {}
            val => {
                extra.push(flag.into());
                extra.push(val.into());
            }
        }
    }
    let names: Vec<String> = Cli::command()
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect();
    let pos = strs
        .iter()
        .skip(1)
        .position(|a| names.contains(a))
        .map(|p| p + 2);
    let mut out = args;
    match pos {
        Some(p) => {
            let tail = out.split_off(p);
            out.extend(extra);
            out.extend(tail);
        }
        None => {
            return Err(invalid(
                "--config requires a subcommand on the command line",
            ))
        }
    }
    Ok(out)
}

fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

/// Parses `args` (including the program name), runs, writes JSON lines to `stdout` and
/// returns the process exit code.
pub fn main_with_args(args: Vec<OsString>, stdout: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stdout, "{}", error_json(e.kind(), &e.to_string()));
            return EXIT_ERROR;
        }
    };
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return EXIT_OK;
            }
            let msg = e.render().to_string();
            let _ = writeln!(stdout, "{}", error_json("usage", msg.trim()));
            return EXIT_ERROR;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stdout, "{}", error_json("usage", e.to_string().trim()));
            return EXIT_ERROR;
        }
    };
    match execute(&cli) {
        Ok(reports) => {
            let mut text = String::new();
            for r in &reports {
                text.push_str(&serde_json::to_string(r).expect("reports serialize"));
                text.push('\n');
            }
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &text).map_err(Error::from),
                None => stdout.write_all(text.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                let _ = writeln!(stdout, "{}", error_json(e.kind(), &e.to_string()));
                return EXIT_ERROR;
            }
            if reports.iter().all(|r| r.all_pass) {
                EXIT_OK
            } else {
                EXIT_LEDGER_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stdout, "{}", error_json(e.kind(), &e.to_string()));
            EXIT_ERROR
        }
    }
}

/// Runs the parsed command on a pool of the requested size.
pub fn execute(cli: &Cli) -> Result<Vec<RunReport>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(invalid("--threads must be positive"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    pool.install(|| run(cli))
}

fn run(cli: &Cli) -> Result<Vec<RunReport>> {
    let config = serde_json::to_value(cli)?;
    let seed = cli.seed;
    let outcomes: Vec<(Outcome, f64)> = match &cli.command {
        Command::Primes(a) => {
            let mut v = Vec::new();
            for &n in &a.n {
                let t = Instant::now();
                let o = primes(a, n)?;
                v.push((o, t.elapsed().as_secs_f64()));
            }
            v
        }
        cmd => {
            let t = Instant::now();
            let o = match cmd {
                Command::Norms(a) => norms(a, seed)?,
                Command::CountAps(a) => count_aps(a, seed)?,
                Command::Decompose(a) => decompose(a, seed)?,
                Command::Roth(a) => roth(a, seed)?,
                Command::Regularity(a) => regularity(a, seed)?,
                Command::Generate(a) => generate(a, seed)?,
                Command::Primes(_) => unreachable!(),
            };
            vec![(o, t.elapsed().as_secs_f64())]
        }
    };
    Ok(outcomes
        .into_iter()
        .map(|(o, secs)| RunReport {
            subcommand: cli.command.name(),
            config: config.clone(),
            all_pass: o.ledger.iter().all(|c| c.pass),
            results: o.results,
            ledger: o.ledger,
            timings: (!cli.no_timings).then_some(Timings {
                total_seconds: secs,
            }),
            artifacts: o.artifacts,
        })
        .collect())
}

fn load_function(src: &FunctionSource, seed: u64) -> Result<CyclicFunction> {
    match (&src.gen, &src.values) {
        (Some(g), None) => {
            let n = src.n.ok_or_else(|| invalid("--gen needs --N"))?;
            generate_function(&g.clone().with_default_seed(seed), n)
        }
        (None, Some(p)) => CyclicFunction::read_csv(File::open(p)?),
        _ => Err(invalid("give exactly one of --gen or --values")),
    }
}

fn read_set_file(p: &Path) -> Result<Vec<u64>> {
    let text = std::fs::read_to_string(p)?;
    text.split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad set member `{t}`")))
        })
        .collect()
}

/// Members of a set from `--set-file` or a set generator on `[1, len]`.
fn load_set(
    file: &Option<PathBuf>,
    gen: &Option<GeneratorSpec>,
    len: Option<u64>,
    seed: u64,
) -> Result<Vec<u64>> {
    match (file, gen) {
        (Some(p), None) => read_set_file(p),
        (None, Some(g)) => {
            let l = len.ok_or_else(|| invalid("a set generator needs a length"))?;
            generate_set(&g.clone().with_default_seed(seed), l)
        }
        _ => Err(invalid("give exactly one of --set-file or --gen")),
    }
}

fn complex_json(c: num_complex::Complex64) -> Value {
    json!({ "re": c.re, "im": c.im })
}

fn norms(a: &NormsArgs, seed: u64) -> Result<Outcome> {
    let mut res = serde_json::Map::new();
    let mut ledger = Vec::new();
    let has_function = a.source.gen.is_some() || a.source.values.is_some();
    if has_function && !a.cayley3 {
        let f = load_function(&a.source, seed)?;
        let n = f.modulus();
        let u2 = gowers::u2(&f);
        res.insert("N".into(), json!(n));
        res.insert("u2".into(), json!(u2));
        if n <= a.direct_max {
            let direct = gowers::u2_fourth_power_direct(&f).max(0.0).powf(0.25);
            res.insert("u2_direct".into(), json!(direct));
            ledger.push(Check::close("u2 direct == spectral", direct, u2, 1e-8));
        }
        if n <= a.u3_max {
            let u3 = gowers::u3(&f);
            res.insert("u3".into(), json!(u3));
            ledger.push(Check::at_most("u2 <= u3", u2, u3 + 1e-9));
        }
        if f.max_abs() <= 1.0 + gowers::BOUND_SLACK {
            ledger.push(Check::at_most("u2 <= 1 for bounded f", u2, 1.0 + 1e-9));
        }
    }
    if let Some(p) = &a.edges {
        let g = EdgeFunction::read_edge_list(File::open(p)?, None, false)?;
        let b = box2_norm(&g);
        let t = triangle_form(&g, &g, &g)?;
        res.insert("vertex_count".into(), json!(g.vertex_count()));
        res.insert("box2".into(), json!(b));
        res.insert("triangle_density".into(), json!(t));
        ledger.push(Check::at_most("|triangle form| <= box2", t.abs(), b + 1e-9));
    }
    if a.cayley3 {
        let members = load_set(
            &a.set_file,
            &a.source.gen,
            a.source.n.map(|n| n as u64),
            seed,
        )?;
        let n = modulus_for(a.source.n, &members)?;
        let h = cayley_3hypergraph(&members, n)?;
        let b3 = box3_norm(&h.hypergraph);
        res.insert("N".into(), json!(n));
        res.insert("box3".into(), json!(b3));
        res.insert("tetrahedra".into(), json!(h.tetrahedron_count));
        res.insert("ap4_pairs".into(), json!(h.progression_pairs));
        if let Some(p) = h.progression_pairs {
            ledger.push(Check::equal(
                "tetrahedra == N^2 * 4-AP pairs",
                h.tetrahedron_count as f64,
                (n * n) as f64 * p as f64,
            ));
        }
    }
    if res.is_empty() {
        return Err(invalid(
            "nothing to measure: give --gen/--values, --edges or --cayley3",
        ));
    }
    Ok(Outcome {
        results: Value::Object(res),
        ledger,
        artifacts: Vec::new(),
    })
}

fn count_aps(a: &CountArgs, seed: u64) -> Result<Outcome> {
    let f = load_function(&a.source, seed)?;
    let fs: Vec<&CyclicFunction> = vec![&f; a.k];
    let mut res = serde_json::Map::new();
    res.insert("N".into(), json!(f.modulus()));
    res.insert("k".into(), json!(a.k));
    let mut ledger = Vec::new();
    let want = |m: CountMethod| match a.method {
        MethodChoice::Both => a.k == 3 || m == CountMethod::Naive,
        MethodChoice::Naive => m == CountMethod::Naive,
        MethodChoice::Spectral => m == CountMethod::Spectral,
    };
    let mut vals = Vec::new();
    for m in [CountMethod::Naive, CountMethod::Spectral] {
        if want(m) {
            let r = gowers::ap_form(a.k, &fs, m)?;
            res.insert(
                format!("{}", serde_json::to_value(m)?.as_str().unwrap_or("?")),
                complex_json(r.value),
            );
            vals.push(r.value);
        }
    }
    res.insert("value".into(), json!(vals[0].re));
    if vals.len() == 2 {
        ledger.push(Check::close(
            "naive == spectral (re)",
            vals[0].re,
            vals[1].re,
            1e-9,
        ));
        ledger.push(Check::close(
            "naive == spectral (im)",
            vals[0].im,
            vals[1].im,
            1e-9,
        ));
    }
    if f.max_abs() <= 1.0 + gowers::BOUND_SLACK {
        let g = gowers::verify_gvn(a.k, &fs)?;
        ledger.push(Check::at_most(
            "|form| <= min Gowers norm",
            g.lhs,
            g.rhs + gowers::INEQUALITY_SLACK,
        ));
    }
    Ok(Outcome {
        results: Value::Object(res),
        ledger,
        artifacts: Vec::new(),
    })
}

fn decompose(a: &DecomposeArgs, seed: u64) -> Result<Outcome> {
    let f = load_function(&a.source, seed)?;
    let mut o = match a.mode {
        DecomposeMode::Weak => {
            let d = weak_decompose(&f, a.lambda)?;
            let mut o = Outcome::new(json!({
                "N": f.modulus(),
                "lambda": a.lambda,
                "threshold": d.threshold,
                "phase_count": d.phase_count,
                "pseudorandom_u2": d.pseudorandom_u2,
            }));
            o.ledger.push(Check::at_most(
                "u2 of pseudorandom part <= lambda",
                d.pseudorandom_u2,
                a.lambda + 1e-9,
            ));
            o.ledger.push(Check::at_most(
                "phases <= lambda^-4",
                d.phase_count as f64,
                a.lambda.powi(-4),
            ));
            write_structured(a, &d.structured, &mut o)?;
            o
        }
        DecomposeMode::Strong => {
            let d = strong_decompose(&f, a.epsilon, a.growth)?;
            let b = &d.bounds;
            let mut o = Outcome::new(serde_json::to_value(&d)?);
            o.ledger.push(Check::at_most(
                "u2 of f_U <= 4/F(T)",
                b.u2_of_fu,
                b.u2_bound,
            ));
            o.ledger
                .push(Check::at_most("L2 of f_S <= 4 eps", b.l2_of_fs, b.l2_bound));
            o.ledger
                .push(Check::at_most("reassembly error", b.reassembly_error, 1e-9));
            o.ledger
                .push(Check::at_most("structured mean drift", b.mean_delta, 1e-9));
            o.ledger.push(Check::at_least(
                "structured min >= 0",
                b.structured_min,
                -1e-9,
            ));
            o.ledger.push(Check::at_most(
                "structured max <= 1",
                b.structured_max,
                1.0 + 1e-9,
            ));
            write_structured(a, &d.structured, &mut o)?;
            o
        }
        DecomposeMode::Chain => {
            let delta = a.delta.unwrap_or_else(|| f.mean().re);
            let c = structured_count_chain(&f, a.epsilon, a.growth, delta)?;
            let mut o = Outcome::new(serde_json::to_value(&c)?);
            o.ledger.extend(c.links.iter().cloned());
            write_structured(a, &c.decomposition.structured, &mut o)?;
            o
        }
    };
    o.results["mode"] = serde_json::to_value(a.mode)?;
    Ok(o)
}

fn write_structured(a: &DecomposeArgs, s: &CyclicFunction, o: &mut Outcome) -> Result<()> {
    if let Some(p) = &a.structured_out {
        s.write_csv(BufWriter::new(File::create(p)?))?;
        o.artifacts.push(p.display().to_string());
    }
    Ok(())
}

fn roth(a: &RothArgs, seed: u64) -> Result<Outcome> {
    let members = load_set(&a.set_file, &a.gen, Some(a.l), seed)?;
    let delta = match a.delta {
        Some(d) => d,
        None => members.iter().filter(|&&m| (1..=a.l).contains(&m)).count() as f64 / a.l as f64,
    };
    let r = roth_iterate(&members, a.l, delta, a.eta)?;
    let mut o = Outcome::new(serde_json::to_value(&r)?);
    o.results["set_size"] = json!(members.len());
    o.ledger.push(Check::at_most(
        "iterations <= cap",
        r.iterations.len() as f64,
        r.iteration_cap as f64,
    ));
    o.ledger.push(Check::at_least(
        "3-AP count >= lower bound",
        r.actual_count as f64,
        r.ap3_count_lower_bound,
    ));
    Ok(o)
}

fn modulus_for(n: Option<usize>, members: &[u64]) -> Result<usize> {
    match n {
        Some(n) if n > 0 => Ok(n),
        Some(_) => Err(invalid("--N must be positive")),
        None => Ok(members.iter().max().map_or(1, |m| *m as usize + 1)),
    }
}

fn regularity(a: &RegularityArgs, seed: u64) -> Result<Outcome> {
    let mut res = serde_json::Map::new();
    let mut ledger = Vec::new();
    let mut artifacts = Vec::new();
    let graph = match (&a.edges, a.cayley || a.cayley3) {
        (Some(p), false) => EdgeFunction::read_edge_list(File::open(p)?, None, false)?,
        (None, true) => {
            let members = load_set(&a.set_file, &a.gen, a.n.map(|n| n as u64), seed)?;
            let n = modulus_for(a.n, &members)?;
            res.insert("N".into(), json!(n));
            res.insert("set_size".into(), json!(members.len()));
            if a.cayley3 {
                let h = cayley_3hypergraph(&members, n)?;
                res.insert("tetrahedra".into(), json!(h.tetrahedron_count));
                res.insert("ap4_pairs".into(), json!(h.progression_pairs));
                if let Some(p) = h.progression_pairs {
                    ledger.push(Check::equal(
                        "tetrahedra == N^2 * 4-AP pairs",
                        h.tetrahedron_count as f64,
                        (n * n) as f64 * p as f64,
                    ));
                }
            }
            let c = cayley_tripartite(&members, n)?;
            res.insert("triangles".into(), json!(c.triangle_count));
            res.insert("ap3_pairs".into(), json!(c.progression_pairs));
            res.insert(
                "oracle_verified".into(),
                json!(c.progression_pairs.is_some()),
            );
            if let Some(p) = c.progression_pairs {
                ledger.push(Check::equal(
                    "triangles == N * 3-AP pairs",
                    c.triangle_count as f64,
                    n as f64 * p as f64,
                ));
            }
            c.graph
        }
        _ => return Err(invalid("give exactly one of --edges or --cayley/--cayley3")),
    };
    res.insert("vertex_count".into(), json!(graph.vertex_count()));
    let mode = a.mode.unwrap_or(if a.delta.is_some() {
        RegularityMode::Removal
    } else if a.cayley || a.cayley3 {
        RegularityMode::Count
    } else {
        RegularityMode::Weak
    });
    res.insert("mode".into(), serde_json::to_value(mode)?);
    let write_partition =
        |p: &crate::graph::VertexPartition, artifacts: &mut Vec<String>| -> Result<()> {
            if let Some(path) = &a.partition_out {
                p.write_csv(BufWriter::new(File::create(path)?))?;
                artifacts.push(path.display().to_string());
            }
            Ok(())
        };
    match mode {
        RegularityMode::Count => {}
        RegularityMode::Weak => {
            let w = weak_regularize(&graph, a.epsilon, seed)?;
            write_partition(&w.partition, &mut artifacts)?;
            ledger.extend(w.checks.iter().cloned());
            res.insert("weak".into(), serde_json::to_value(&w)?);
        }
        RegularityMode::Strong => {
            let d = strong_regularize(&graph, a.epsilon, a.growth, seed)?;
            write_partition(&d.partition, &mut artifacts)?;
            ledger.extend(d.checks.iter().cloned());
            res.insert("strong".into(), serde_json::to_value(&d)?);
        }
        RegularityMode::Removal => {
            let delta = a.delta.ok_or_else(|| invalid("removal needs --delta"))?;
            let (cleaned, r) = triangle_removal(&graph, delta, seed)?;
            write_partition(&r.decomposition.partition, &mut artifacts)?;
            ledger.extend(r.checks.iter().cloned());
            if let Some(p) = &a.graph_out {
                cleaned.write_edge_list(BufWriter::new(File::create(p)?))?;
                artifacts.push(p.display().to_string());
            }
            if let Some(p) = &a.removal_out {
                r.write_json(BufWriter::new(File::create(p)?))?;
                artifacts.push(p.display().to_string());
            }
            res.insert("removal".into(), serde_json::to_value(&r)?);
        }
    }
    Ok(Outcome {
        results: Value::Object(res),
        ledger,
        artifacts,
    })
}

fn primes(a: &PrimesArgs, n: u64) -> Result<Outcome> {
    let weights = mangoldt_weights(n, a.w, a.b)?;
    let mut o = Outcome::new(json!({ "weights": weights }));
    if a.bias {
        o.results["bias"] = serde_json::to_value(fourier_bias(&weights)?)?;
    }
    drop(weights);
    if !a.mean_only {
        let methods: &[CountMethod] = match a.method {
            MethodChoice::Naive => &[CountMethod::Naive],
            MethodChoice::Spectral => &[CountMethod::Spectral],
            MethodChoice::Both => &[CountMethod::Naive, CountMethod::Spectral],
        };
        let mut avgs = Vec::new();
        for &m in methods {
            let r = prime_ap_average_with(a.k, n, a.w, a.b, m)?;
            avgs.push(r.average);
            o.results[format!(
                "average_{}",
                serde_json::to_value(m)?.as_str().unwrap_or("?")
            )] = serde_json::to_value(&r)?;
        }
        if avgs.len() == 2 {
            o.ledger
                .push(Check::close("naive == spectral", avgs[0], avgs[1], 1e-6));
        }
    }
    Ok(o)
}

fn generate(a: &GenerateArgs, seed: u64) -> Result<Outcome> {
    let spec = a.gen.clone().with_default_seed(seed);
    let mut o;
    if spec.is_set() {
        let members = generate_set(&spec, a.l)?;
        o = Outcome::new(json!({ "gen": spec, "L": a.l, "size": members.len() }));
        match &a.emit {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                for m in &members {
                    writeln!(w, "{m}")?;
                }
                w.flush()?;
                o.artifacts.push(p.display().to_string());
            }
            None => o.results["members"] = json!(members),
        }
    } else {
        let n = usize::try_from(a.l).map_err(|_| invalid("modulus too large"))?;
        let f = generate_function(&spec, n)?;
        o = Outcome::new(json!({ "gen": spec, "N": n, "mean": complex_json(f.mean()) }));
        match &a.emit {
            Some(p) => {
                f.write_csv(BufWriter::new(File::create(p)?))?;
                o.artifacts.push(p.display().to_string());
            }
            None => {
                o.results["values"] =
                    Value::Array(f.values().iter().map(|c| complex_json(*c)).collect());
            }
        }
    }
    Ok(o)
}
