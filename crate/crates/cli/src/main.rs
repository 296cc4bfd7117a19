use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use skewcode::lrc::construct;
use skewcode::msrd::{construct_msrd, min_sum_rank_bruteforce};
use skewcode::verify::{
    decode_erasures, is_maximally_recoverable, unrank_combination, ErasurePattern, Mode, PatternSpace, SplitMix64,
    VerifyOptions, DEFAULT_BUDGET,
};
use skewcode::{CodeError, Element, LrcCode, LrcParams, Variant, FORMAT_VERSION};

const EXIT_USAGE: u8 = 2;
const EXIT_FAILED: u8 = 3;

/// Construct and certify maximally recoverable local reconstruction codes.
///
/// Exit status: 0 on success, 2 on bad usage, parameters or budget, 3 when
/// a certification, decode or simulation check fails.
#[derive(Parser)]
#[command(name = "skewcode", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write its bundle.
    Construct(ConstructArgs),
    /// Certify a code bundle by erasure-pattern rank checks.
    Verify(VerifyArgs),
    /// Encode a message.
    Encode(EncodeArgs),
    /// Fill in the erased symbols of a received word.
    Decode(DecodeArgs),
    /// Run seeded encode, erase and decode round trips.
    Simulate(SimulateArgs),
    /// Build a maximum sum-rank distance code.
    Msrd(MsrdArgs),
    /// Summarise a code bundle.
    Info { code: PathBuf },
}

#[derive(clap::Args)]
struct ConstructArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    h: usize,
    /// Local parities per group (defaults to 1).
    #[arg(long, default_value_t = 1)]
    a: usize,
    #[arg(long)]
    q0: Option<u32>,
    /// main, main_improved, bch_a1, global_outside_case1,
    /// global_outside_case2, global_outside_a1_case1, global_outside_a1_case2
    #[arg(long, default_value = "main", value_parser = parse_variant)]
    variant: Variant,
    #[arg(long)]
    h_local: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(clap::Args)]
struct VerifyArgs {
    code: PathBuf,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    h_local: Option<usize>,
    /// Largest pattern count checked in exhaustive mode.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EncodeArgs {
    code: PathBuf,
    /// Comma-separated symbol encodings; drawn from `--seed` when absent.
    #[arg(long, value_delimiter = ',')]
    message: Option<Vec<u32>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DecodeArgs {
    code: PathBuf,
    /// JSON array of symbol encodings with `null` for erasures, or an
    /// object holding such an array under `received`.
    #[arg(long)]
    received: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Distribution {
    /// Uniform over admissible erasure-pattern tuples.
    Admissible,
    /// Up to `a` erasures inside one random group.
    Local,
}

#[derive(clap::Args)]
struct SimulateArgs {
    code: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "admissible")]
    distribution: Distribution,
    #[arg(long)]
    h_local: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct MsrdArgs {
    #[arg(long)]
    q0: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    k: usize,
    /// Also compute the minimum sum-rank distance by brute force.
    #[arg(long)]
    certify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: CodeError| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct(a) => run_construct(a),
        Command::Verify(a) => run_verify(a),
        Command::Encode(a) => run_encode(a),
        Command::Decode(a) => run_decode(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Msrd(a) => run_msrd(a),
        Command::Info { code } => run_info(&code),
    }
}

fn load_code(path: &Path) -> Result<LrcCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    LrcCode::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").context("writing to stdout")
        }
    }
}

fn run_construct(a: ConstructArgs) -> Result<ExitCode> {
    let mut params = LrcParams::new(a.n, a.r, a.h, a.a, a.variant);
    if let Some(q0) = a.q0 {
        params = params.with_q0(q0);
    }
    if let Some(hl) = a.h_local {
        params = params.with_h_local(hl);
    }
    let code = construct(&params)?;
    fs::write(&a.out, code.to_json() + "\n").with_context(|| format!("writing {}", a.out.display()))?;
    let info = code.info();
    println!("variant: {}", params.variant);
    println!("q = {}", code.tower().q());
    println!("q0 = {}", info.q0);
    println!("m = {}", info.m);
    println!("formula field size: {} = {}", info.formula, info.formula_field_size);
    println!("dimension k = {}", code.dimension());
    println!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn run_verify(a: VerifyArgs) -> Result<ExitCode> {
    let code = load_code(&a.code)?;
    let mode = match a.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sampled => Mode::Sampled { count: a.samples, seed: a.seed },
    };
    let opts = VerifyOptions { mode, h_local: a.h_local, budget: a.budget };
    let report = is_maximally_recoverable(&code, &opts)?;
    if let Some(path) = &a.report {
        write_json(Some(path), &report)?;
    }
    println!("patterns checked: {}", report.patterns_checked);
    println!("failing patterns: {}", report.failure_count);
    for p in &report.local_failures {
        println!("local block not MDS on columns {:?}", p.columns);
    }
    for p in report.failures.iter().take(20) {
        println!("witness: {:?}", p.columns);
    }
    if report.failures.len() > 20 {
        println!("({} more witnesses in the report)", report.failures.len() - 20);
    }
    if report.certified() {
        println!("certified");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("NOT maximally recoverable");
        Ok(ExitCode::from(EXIT_FAILED))
    }
}

fn random_message(code: &LrcCode, rng: &mut SplitMix64) -> Vec<Element> {
    let q = code.tower().q() as u128;
    (0..code.dimension()).map(|_| Element::from_int(rng.below(q) as u32)).collect()
}

fn ints(v: &[Element]) -> Vec<u32> {
    v.iter().map(|e| e.to_int()).collect()
}

#[derive(Serialize)]
struct EncodeOutput {
    format_version: u32,
    message: Vec<u32>,
    codeword: Vec<u32>,
}

fn run_encode(a: EncodeArgs) -> Result<ExitCode> {
    let code = load_code(&a.code)?;
    let message = match a.message {
        Some(m) => m.iter().map(|&v| code.tower().element(v)).collect::<Result<Vec<_>, _>>()?,
        None => random_message(&code, &mut SplitMix64::new(a.seed)),
    };
    let codeword = code.encode(&message)?;
    let out = EncodeOutput { format_version: FORMAT_VERSION, message: ints(&message), codeword: ints(&codeword) };
    write_json(a.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct DecodeOutput {
    format_version: u32,
    codeword: Vec<u32>,
    reads_per_group: Vec<usize>,
    global_reads: usize,
    local: bool,
}

fn run_decode(a: DecodeArgs) -> Result<ExitCode> {
    let code = load_code(&a.code)?;
    let text = fs::read_to_string(&a.received).with_context(|| format!("reading {}", a.received.display()))?;
    let value: Value = serde_json::from_str(&text)?;
    let arr = match &value {
        Value::Array(v) => v,
        Value::Object(o) => o.get("received").and_then(Value::as_array).ok_or_else(|| anyhow!("missing `received` array"))?,
        _ => bail!("received word must be a JSON array"),
    };
    let received = arr
        .iter()
        .map(|v| match v {
            Value::Null => Ok(None),
            v => {
                let x = v.as_u64().ok_or_else(|| anyhow!("bad symbol {v}"))?;
                Ok(Some(code.tower().element(u32::try_from(x)?)?))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    match decode_erasures(&code, &received) {
        Ok(d) => {
            let out = DecodeOutput {
                format_version: FORMAT_VERSION,
                codeword: ints(&d.codeword),
                reads_per_group: d.reads_per_group,
                global_reads: d.global_reads,
                local: d.local,
            };
            write_json(a.out.as_deref(), &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ (CodeError::Uncorrectable | CodeError::NotACodeword)) => {
            eprintln!("decode failed: {e}");
            Ok(ExitCode::from(EXIT_FAILED))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct Trial {
    erased: Vec<usize>,
    success: bool,
    reads_per_group: Vec<usize>,
    global_reads: usize,
    local: bool,
}

#[derive(Serialize)]
struct SimulationStats {
    format_version: u32,
    trials: u64,
    seed: u64,
    distribution: Distribution,
    successes: u64,
    failures: u64,
    local_repairs: u64,
    max_reads_per_group: usize,
    per_trial: Vec<Trial>,
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn draw_pattern(code: &LrcCode, space: &PatternSpace, dist: Distribution, rng: &mut SplitMix64) -> ErasurePattern {
    match dist {
        Distribution::Admissible => loop {
            if let Some(p) = space.unrank(rng.below(space.total())) {
                return p;
            }
        },
        Distribution::Local => {
            let lay = code.layout();
            if lay.a == 0 || lay.g() == 0 {
                return ErasurePattern::new(vec![]);
            }
            let g = rng.below(lay.g() as u128) as usize;
            let (s, e) = lay.groups[g];
            let count = 1 + rng.below(lay.a as u128) as usize;
            let rank = rng.below(binom(e - s, count));
            ErasurePattern::new(unrank_combination(e - s, count, rank).into_iter().map(|c| s + c).collect())
        }
    }
}

fn run_simulate(a: SimulateArgs) -> Result<ExitCode> {
    let code = load_code(&a.code)?;
    let space = PatternSpace::new(code.layout(), a.h_local);
    let mut stats = SimulationStats {
        format_version: FORMAT_VERSION,
        trials: a.trials,
        seed: a.seed,
        distribution: a.distribution,
        successes: 0,
        failures: 0,
        local_repairs: 0,
        max_reads_per_group: 0,
        per_trial: Vec::with_capacity(a.trials as usize),
    };
    for i in 0..a.trials {
        let mut rng = SplitMix64::new(a.seed ^ SplitMix64::mix(i.wrapping_add(1)));
        let message = random_message(&code, &mut rng);
        let codeword = code.encode(&message)?;
        let pattern = draw_pattern(&code, &space, a.distribution, &mut rng);
        let mut received: Vec<Option<Element>> = codeword.iter().copied().map(Some).collect();
        for &c in &pattern.columns {
            received[c] = None;
        }
        let trial = match decode_erasures(&code, &received) {
            Ok(d) => Trial {
                erased: pattern.columns,
                success: d.codeword == codeword,
                reads_per_group: d.reads_per_group,
                global_reads: d.global_reads,
                local: d.local,
            },
            Err(_) => Trial {
                erased: pattern.columns,
                success: false,
                reads_per_group: vec![],
                global_reads: 0,
                local: false,
            },
        };
        if trial.success {
            stats.successes += 1;
        } else {
            stats.failures += 1;
        }
        if trial.local {
            stats.local_repairs += 1;
        }
        let most = trial.reads_per_group.iter().copied().max().unwrap_or(0);
        stats.max_reads_per_group = stats.max_reads_per_group.max(most);
        stats.per_trial.push(trial);
    }
    if a.out.is_some() {
        write_json(a.out.as_deref(), &stats)?;
    }
    println!("trials: {}", stats.trials);
    println!("successes: {}", stats.successes);
    println!("local repairs: {}", stats.local_repairs);
    println!("max reads in one group: {}", stats.max_reads_per_group);
    if stats.failures > 0 {
        println!("{} trials failed to decode", stats.failures);
        return Ok(ExitCode::from(EXIT_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_msrd(a: MsrdArgs) -> Result<ExitCode> {
    let code = construct_msrd(a.q0, a.m, a.k)?;
    let mut json = serde_json::to_value(code.to_json_value())?;
    let bound = code.n() - code.k() + 1;
    println!("n = {}, k = {}, q = {}", code.n(), code.k(), code.tower().q());
    println!("singleton bound n - k + 1 = {bound}");
    let mut ok = true;
    if a.certify {
        let d = min_sum_rank_bruteforce(&code)?;
        println!("minimum sum-rank distance = {d}");
        json["min_sum_rank_distance"] = d.into();
        ok = d == bound;
    }
    match &a.out {
        Some(p) => write_json(Some(p), &json)?,
        None if !a.certify => write_json(None, &json)?,
        None => {}
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) })
}

fn run_info(path: &Path) -> Result<ExitCode> {
    let code = load_code(path)?;
    let p = code.params();
    let t = code.tower();
    let lay = code.layout();
    let info = code.info();
    println!("variant: {}", p.variant);
    println!("n = {}, r = {}, h = {}, a = {}, k = {}", p.n, p.r, p.h, p.a, code.dimension());
    if let Some(hl) = p.h_local {
        println!("h_local = {hl}");
    }
    println!("field: q = {} = {}^{}, q0 = {} = {}^{}", t.q(), t.q0(), t.m(), t.q0(), t.p(), t.k());
    println!("base modulus: {:?}", t.base_modulus());
    println!("extension modulus: {:?}", t.ext_modulus());
    println!("formula field size: {} = {}", info.formula, info.formula_field_size);
    if let Some(c) = info.inner_codimension {
        println!("inner code codimension: {c}");
    }
    println!("H: {} x {}", code.parity_check().rows(), code.parity_check().cols());
    for (i, &(s, e)) in lay.groups.iter().enumerate() {
        println!("group {i}: columns [{s}, {e}), local rows {:?}", lay.local_rows(i));
    }
    if let Some((s, e)) = lay.global_cols {
        println!("global parity columns: [{s}, {e})");
    }
    println!("band rows: {:?}", lay.global_rows());
    Ok(ExitCode::SUCCESS)
}
