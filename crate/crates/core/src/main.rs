use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use pdlab::alphabet::{for_each_word, Alphabet, Sym};
use pdlab::harness::{run_experiment_file, BuildError, HarnessError, Selector};
use pdlab::lz78::{decode, encode, from_file_bytes, to_file_bytes, LzDictionary};
use pdlab::pda::{
    check_il, check_visibly, parse_spec, run, run_inverse_pair, state_trailer, InverseVerdict, Pushdown, SymbolClass,
};
use pdlab::plogon::{
    check_il_online, check_memory_bound, run_online, EnumPrefix, IndexCompressor, MemoryBound, MemoryVerdict,
    OnlineIlVerdict,
};
use pdlab::witness::{generate, read_sequence, write_checkpoints, write_sequence, SequenceHeader, WitnessSpec};
use pdlab::zoo::{build_theorem4_pair, build_theorem5_visibly, build_theorem6_pair, theorem5_partition, ZooParams};

#[derive(Parser)]
#[command(name = "pdlab", version, about = "Pushdown, LZ78 and polylog-space compressors on separating sequences")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a witness prefix and its checkpoint sidecar.
    Gen(GenArgs),
    /// Compress a file with one of the selectors.
    Compress(CodecArgs),
    /// Invert `compress` for lz78, zoo:t4 and zoo:t6.
    Decompress(CodecArgs),
    /// Check a machine and print a JSON report.
    Verify(VerifyArgs),
    /// Run an experiment config and write its series under $PDLAB_OUT.
    Experiment {
        config: PathBuf,
        /// Output root; defaults to $PDLAB_OUT, then `results`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    T1,
    T2,
    T4,
    T5,
    T6,
    Enum,
    T7,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Alphabet given by its symbols, e.g. `01` or `0123`.
    #[arg(long)]
    alphabet: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    v: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    base: Option<usize>,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    first_zone: Option<u64>,
    #[arg(long)]
    last_zone: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    len: u64,
    /// Defaults to `<family>-<seed>.seq`; the sidecar gets `.checkpoints.csv` appended.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Construction parameters: a JSON file first, then individual flags.
#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    period: Option<usize>,
    #[arg(long)]
    v: Option<usize>,
    #[arg(long = "v-prime")]
    v_prime: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    skip_counting_prefix: bool,
    #[arg(long)]
    counting_prefix: Option<u64>,
}

#[derive(Args)]
struct CodecArgs {
    selector: Selector,
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Il,
    Visibly,
    Inverse,
    Memory,
}

#[derive(Args)]
struct VerifyArgs {
    selector: Selector,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value_t = 10)]
    maxlen: usize,
    /// Per-symbol classes for `spec:` machines, one of c, r, i per input symbol.
    #[arg(long)]
    partition: Option<String>,
    /// Well-formed and corrupted samples each, for `inverse`.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Memory bound `a·log2(n)^c` bits.
    #[arg(long, default_value_t = 64.0)]
    a: f64,
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    n: u64,
    #[command(flatten)]
    params: ParamArgs,
}

/// Accepts `1000000` as well as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
        _ => Err(format!("{s:?} is not a non-negative integer")),
    }
}

enum Failure {
    /// Exit 1.
    Check,
    /// Exit 2.
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Compress(a) => cmd_compress(a),
        Cmd::Decompress(a) => cmd_decompress(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Experiment { config, out } => cmd_experiment(&config, out),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let sigma = match &a.alphabet {
        Some(s) => {
            let n = s.chars().count();
            let canon = Alphabet::with_size(n)?;
            if canon.as_string() != *s {
                return Err(Failure::Usage(format!("alphabet must be {:?} for size {n}", canon.as_string())));
            }
            n
        }
        None => 2,
    };
    let need = |x: Option<usize>, name: &str| x.ok_or_else(|| Failure::Usage(format!("--{name} is required")));
    let spec = match a.family {
        Family::T1 => WitnessSpec::T1 { sigma },
        Family::T2 => WitnessSpec::T2 { sigma, c: a.c.unwrap_or(7) },
        Family::T4 => WitnessSpec::T4 { sigma, k: need(a.k, "k")? },
        Family::T5 => WitnessSpec::T5 { t: need(a.t, "t")?, base: a.base.unwrap_or(8) },
        Family::T6 => WitnessSpec::T6 { sigma, k: need(a.k, "k")?, v: a.v.unwrap_or(8) },
        Family::Enum => WitnessSpec::Enum { sigma },
        Family::T7 => WitnessSpec::T7 { first_zone: a.first_zone.unwrap_or(4), last_zone: a.last_zone.unwrap_or(14) },
    };
    spec.validate()?;
    if matches!(spec, WitnessSpec::T5 { .. } | WitnessSpec::T7 { .. }) && a.alphabet.as_deref().is_some_and(|s| s.len() != spec.sigma()) {
        return Err(Failure::Usage(format!("this family uses {} symbols", spec.sigma())));
    }
    let randomized = !matches!(spec, WitnessSpec::Enum { .. } | WitnessSpec::T6 { .. });
    let seed = match (a.seed, randomized) {
        (Some(s), _) => s,
        (None, false) => 0,
        (None, true) => return Err(Failure::Usage("--seed is required for this family".into())),
    };
    let w = generate(&spec, seed, a.len)?;
    let header = SequenceHeader {
        alphabet: w.alphabet.as_string(),
        family: spec.id().into(),
        params: serde_json::to_value(&spec)?,
        seed,
    };
    let out = a.out.unwrap_or_else(|| PathBuf::from(format!("{}-{seed}.seq", spec.id())));
    write_sequence(BufWriter::new(fs::File::create(&out)?), &header, &w.alphabet, &w.symbols)?;
    write_checkpoints(fs::File::create(sidecar(&out))?, &w.checkpoints)?;
    Ok(())
}

fn sidecar(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".checkpoints.csv");
    PathBuf::from(s)
}

impl ParamArgs {
    fn resolve(&self, sigma: usize) -> Result<ZooParams, Failure> {
        let mut p = match &self.params {
            Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
            None => ZooParams { sigma, ..ZooParams::default() },
        };
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(x) = self.$f { p.$f = x; })* };
        }
        set!(sigma, k, period, v, v_prime, t);
        if self.skip_counting_prefix {
            p.skip_counting_prefix = true;
        }
        if self.counting_prefix.is_some() {
            p.counting_prefix = self.counting_prefix;
        }
        Ok(p)
    }
}

fn build_err(e: BuildError) -> Failure {
    Failure::Usage(e.to_string())
}

fn read_seq(path: &Path) -> Result<(SequenceHeader, Alphabet, Vec<Sym>), Failure> {
    Ok(read_sequence(BufReader::new(fs::File::open(path)?))?)
}

/// Zoo outputs are sequence files whose header carries the construction
/// parameters and the source header, so decompression restores the file.
fn cmd_compress(a: CodecArgs) -> Outcome {
    if a.selector == Selector::Lz78 {
        let bytes = fs::read(&a.input)?;
        let syms: Vec<Sym> = bytes.iter().map(|&b| b as Sym).collect();
        fs::write(&a.output, to_file_bytes(&encode(&syms, &LzDictionary::new(256)), 256))?;
        return Ok(());
    }
    let (header, alphabet, w) = read_seq(&a.input)?;
    let p = a.params.resolve(alphabet.len())?;
    match &a.selector {
        Selector::ZooT4 | Selector::ZooT6 => {
            let c = if a.selector == Selector::ZooT4 { build_theorem4_pair(&p)?.0 } else { build_theorem6_pair(&p)?.0 };
            check_alphabet(c.input_size(), &alphabet)?;
            let r = run(&c, &w, false)?;
            let count = c.state_count().expect("tabulated");
            let mut out = r.output;
            out.extend(state_trailer(c.state_index(&r.final_state).expect("tabulated"), count, alphabet.len()));
            let h = SequenceHeader {
                alphabet: alphabet.as_string(),
                family: a.selector.to_string(),
                params: json!({ "zoo": p, "source": header.line() }),
                seed: header.seed,
            };
            write_sequence(BufWriter::new(fs::File::create(&a.output)?), &h, &alphabet, &out)?;
        }
        Selector::ZooT5 | Selector::Spec(_) => {
            let m = a.selector.build(&p, 4, Path::new(".")).map_err(build_err)?;
            let pdlab::harness::Compressor::Pd(m) = m else { unreachable!() };
            check_alphabet(m.input_size(), &alphabet)?;
            let r = run(&m, &w, m.has_endmarker())?;
            if let Some(&bad) = r.output.iter().find(|&&s| s as usize >= alphabet.len()) {
                return Err(Failure::Usage(format!("machine writes symbol {bad} outside the input alphabet")));
            }
            let h = SequenceHeader { alphabet: alphabet.as_string(), family: a.selector.to_string(), params: json!(p), seed: header.seed };
            write_sequence(BufWriter::new(fs::File::create(&a.output)?), &h, &alphabet, &r.output)?;
        }
        Selector::PlogEnum | Selector::PlogT7 => {
            let out = if a.selector == Selector::PlogEnum {
                run_online(EnumPrefix::new(alphabet.len()), &w)?.output
            } else {
                check_alphabet(2, &alphabet)?;
                run_online(IndexCompressor::new(first_zone_of(&header)), &w)?.output
            };
            let mut bytes = format!("{}\n{}\n", a.selector, out.len()).into_bytes();
            bytes.extend_from_slice(out.as_bytes());
            fs::write(&a.output, bytes)?;
        }
        Selector::Lz78 => unreachable!(),
    }
    Ok(())
}

fn first_zone_of(h: &SequenceHeader) -> u64 {
    h.params.get("first_zone").and_then(Value::as_u64).unwrap_or(4)
}

fn check_alphabet(size: usize, a: &Alphabet) -> Outcome {
    if size != a.len() {
        return Err(Failure::Usage(format!("machine reads {size} symbols but the file uses {}", a.len())));
    }
    Ok(())
}

fn cmd_decompress(a: CodecArgs) -> Outcome {
    match &a.selector {
        Selector::Lz78 => {
            let (stream, sigma) = from_file_bytes(&fs::read(&a.input)?)?;
            let syms = decode(&stream.bits, sigma, &LzDictionary::new(sigma))?;
            if sigma != 256 {
                return Err(Failure::Usage(format!("stream is over {sigma} symbols, not bytes")));
            }
            fs::write(&a.output, syms.iter().map(|&s| s as u8).collect::<Vec<u8>>())?;
        }
        Selector::ZooT4 | Selector::ZooT6 => {
            let (h, alphabet, coded) = read_seq(&a.input)?;
            if h.family != a.selector.to_string() {
                return Err(Failure::Usage(format!("file was written by {}", h.family)));
            }
            let p: ZooParams = serde_json::from_value(h.params["zoo"].clone())?;
            let source = h.params["source"].as_str().ok_or_else(|| Failure::Usage("missing source header".into()))?;
            let source = SequenceHeader::parse(source)?;
            let out = if a.selector == Selector::ZooT4 {
                run(&build_theorem4_pair(&p)?.1, &coded, true)?.output
            } else {
                run(&build_theorem6_pair(&p)?.1, &coded, true)?.output
            };
            write_sequence(BufWriter::new(fs::File::create(&a.output)?), &source, &alphabet, &out)?;
        }
        s => return Err(Failure::Usage(format!("{s} has no decompressor"))),
    }
    Ok(())
}

fn report(selector: &Selector, mode: &str, passed: bool, detail: Value) -> Outcome {
    let r = json!({ "selector": selector.to_string(), "mode": mode, "passed": passed, "detail": detail });
    println!("{}", serde_json::to_string_pretty(&r)?);
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn word_string(w: &[Sym]) -> String {
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let sel = &a.selector;
    let sigma = match sel {
        Selector::ZooT5 => 2 * a.params.t.unwrap_or(2),
        _ => a.params.sigma.unwrap_or(2),
    };
    let p = a.params.resolve(sigma)?;
    match a.mode {
        Mode::Il => match sel {
            Selector::Lz78 => {
                let mut bad = None;
                for_each_word(p.sigma, a.maxlen, |w| {
                    if bad.is_none() && decode(&encode(w, &LzDictionary::new(p.sigma)).bits, p.sigma, &LzDictionary::new(p.sigma)).ok().as_deref() != Some(w) {
                        bad = Some(w.to_vec());
                    }
                });
                report(sel, "il", bad.is_none(), json!({ "counterexample": bad.map(|w| word_string(&w)) }))
            }
            Selector::PlogEnum | Selector::PlogT7 => {
                let v = if *sel == Selector::PlogEnum {
                    check_il_online(|| EnumPrefix::new(p.sigma), p.sigma, a.maxlen)?
                } else {
                    check_il_online(|| IndexCompressor::new(4), 2, a.maxlen)?
                };
                match v {
                    OnlineIlVerdict::Ok { words } => report(sel, "il", true, json!({ "words": words })),
                    OnlineIlVerdict::Collision { first, second } => report(
                        sel,
                        "il",
                        false,
                        json!({ "collision": [word_string(&first), word_string(&second)] }),
                    ),
                }
            }
            _ => {
                let m = match sel.build(&p, 4, Path::new(".")).map_err(build_err)? {
                    pdlab::harness::Compressor::Pd(m) => m,
                    _ => unreachable!(),
                };
                match check_il(&m, a.maxlen, m.has_endmarker()) {
                    Ok(pdlab::pda::IlVerdict::Ok { words }) => report(sel, "il", true, json!({ "words": words })),
                    Ok(pdlab::pda::IlVerdict::Collision { first, second }) => report(
                        sel,
                        "il",
                        false,
                        json!({ "collision": [word_string(&first), word_string(&second)] }),
                    ),
                    Err((w, e)) => report(sel, "il", false, json!({ "error": e.to_string(), "word": word_string(&w) })),
                }
            }
        },
        Mode::Visibly => {
            let (m, part) = match sel {
                Selector::ZooT5 => (build_theorem5_visibly(&p)?, theorem5_partition(p.t)),
                Selector::Spec(path) => {
                    let m = parse_spec(&fs::read_to_string(path)?)?;
                    let part = a.partition.as_deref().ok_or_else(|| Failure::Usage("--partition is required".into()))?;
                    let part = part
                        .chars()
                        .map(|c| match c {
                            'c' => Ok(SymbolClass::Call),
                            'r' => Ok(SymbolClass::Return),
                            'i' => Ok(SymbolClass::Internal),
                            _ => Err(Failure::Usage(format!("bad partition class {c:?}"))),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    (m, part)
                }
                _ => return Err(Failure::Usage(format!("{sel} is not a table machine with a partition"))),
            };
            let v = check_visibly(&m, &part);
            report(sel, "visibly", v.is_empty(), json!({ "violations": v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>() }))
        }
        Mode::Inverse => {
            let seed = a.seed.ok_or_else(|| Failure::Usage("--seed is required".into()))?;
            let (spec, pair) = match sel {
                Selector::ZooT4 => (WitnessSpec::T4 { sigma: p.sigma, k: p.k }, 4),
                Selector::ZooT6 => (WitnessSpec::T6 { sigma: p.sigma, k: p.k, v: p.v }, 6),
                _ => return Err(Failure::Usage(format!("{sel} has no inverse machine"))),
            };
            let w = generate(&spec, seed, 200_000)?.symbols;
            let failures = if pair == 4 {
                let (c, d) = build_theorem4_pair(&p)?;
                inverse_samples(&c, &d, &w, p.sigma, a.samples, seed)?
            } else {
                let (c, d) = build_theorem6_pair(&p)?;
                inverse_samples(&c, &d, &w, p.sigma, a.samples, seed)?
            };
            report(sel, "inverse", failures.is_empty(), json!({ "samples": 2 * a.samples, "failures": failures }))
        }
        Mode::Memory => {
            let bound = MemoryBound { a: a.a, c_exp: a.c };
            let mut lengths = vec![];
            let mut n = 1u64;
            while n < a.n {
                lengths.push(n);
                n *= 4;
            }
            lengths.push(a.n);
            let v = match sel {
                Selector::PlogEnum => {
                    let spec = WitnessSpec::Enum { sigma: p.sigma };
                    let w = generate(&spec, 0, a.n)?.symbols;
                    check_memory_bound(|| EnumPrefix::new(p.sigma), &lengths, bound, |n| w[..n as usize].to_vec())?
                }
                Selector::PlogT7 => {
                    let seed = a.seed.ok_or_else(|| Failure::Usage("--seed is required".into()))?;
                    let spec = WitnessSpec::T7 { first_zone: 4, last_zone: 14 };
                    let w = generate(&spec, seed, a.n)?.symbols;
                    let lengths: Vec<u64> = lengths.into_iter().map(|n| n.min(w.len() as u64)).collect();
                    check_memory_bound(|| IndexCompressor::new(4), &lengths, bound, |n| w[..n as usize].to_vec())?
                }
                _ => return Err(Failure::Usage(format!("{sel} is not an online compressor"))),
            };
            match v {
                MemoryVerdict::Ok { worst_fraction } => report(sel, "memory", true, json!({ "worstFraction": worst_fraction })),
                MemoryVerdict::Exceeded { n, peak_bits, bound_bits } => {
                    report(sel, "memory", false, json!({ "n": n, "peakBits": peak_bits, "boundBits": bound_bits }))
                }
            }
        }
    }
}

/// Prefixes and interior windows of `w`, then the same with one symbol changed.
fn inverse_samples<C: Pushdown, D: Pushdown>(
    c: &C,
    d: &D,
    w: &[Sym],
    sigma: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<String>, Failure> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..2 * samples {
        let n = rng.gen_range(1..=4000.min(w.len()));
        let start = rng.gen_range(0..=w.len() - n);
        let mut x = if i % 2 == 0 { w[..n].to_vec() } else { w[start..start + n].to_vec() };
        if i >= samples {
            let j = rng.gen_range(0..n);
            x[j] = (x[j] + rng.gen_range(1..sigma as Sym)) % sigma as Sym;
        }
        if run_inverse_pair(c, d, &x)? != InverseVerdict::Ok && failures.len() < 5 {
            failures.push(word_string(&x));
        }
    }
    Ok(failures)
}

fn cmd_experiment(config: &Path, out: Option<PathBuf>) -> Outcome {
    let root = out
        .or_else(|| std::env::var_os("PDLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    let r = match run_experiment_file(config, &root) {
        Ok(r) => r,
        Err(e @ HarnessError::ConfigInvalid { .. }) => return Err(Failure::Usage(e.to_string())),
        Err(e) => return Err(Failure::Usage(e.to_string())),
    };
    for (name, e) in &r.estimates {
        println!("{}: {name} rhoHat={:.6} RHat={:.6} argmax={}", r.id, e.rho_hat, e.r_hat, e.argmax_prefix);
    }
    for o in &r.outcomes {
        println!("{} {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.assertion, o.detail);
    }
    println!("wrote {}", r.dir.display());
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}
