//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines show up in `cargo test` output.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use pdlab::alphabet::{for_each_word, Sym};
use pdlab::harness::{run_experiment_file, ExperimentReport};
use pdlab::lz78::{decode, encode, from_file_bytes, parse_into, to_file_bytes, LzDictionary, LzStream};
use pdlab::pda::{check_il, run, run_inverse_pair, InverseVerdict, PdaError, SpecBuilder};
use pdlab::plogon::{check_il_online, check_memory_bound, EnumPrefix, IndexCompressor, MemoryBound, MemoryVerdict, OnlineIlVerdict};
use pdlab::witness::{generate, t6_enumerate, t6_flag, WitnessSpec};
use pdlab::zoo::{build_theorem4_pair, build_theorem5_visibly, build_theorem6_pair, ZooParams};

type Verdict = Result<String, String>;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn lz_round_trip(x: &[Sym], sigma: usize) -> bool {
    let e = encode(x, &LzDictionary::new(sigma));
    let Ok((back, s)) = from_file_bytes(&to_file_bytes(&e, sigma)) else { return false };
    s == sigma && decode(&back.bits, sigma, &LzDictionary::new(sigma)).ok().as_deref() == Some(x)
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let mut words = 0u64;
    let mut bad = None;
    for_each_word(2, 14, |w| {
        words += 1;
        if bad.is_none() && !lz_round_trip(w, 2) {
            bad = Some(w.to_vec());
        }
    });
    if let Some(w) = bad {
        return Err(format!("binary word {w:?} does not round trip"));
    }
    let exhaustive = t.elapsed().as_secs_f64();
    if exhaustive >= 60.0 {
        return Err(format!("exhaustive pass took {exhaustive:.1} s"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for i in 0..1000 {
        let sigma = [2, 4, 16][i % 3];
        let n = rng.gen_range(0..=100_000);
        let x: Vec<Sym> = (0..n).map(|_| rng.gen_range(0..sigma as Sym)).collect();
        if !lz_round_trip(&x, sigma) {
            return Err(format!("random word #{i} (|Σ| = {sigma}, length {n}) does not round trip"));
        }
    }
    Ok(format!("{words} binary words in {exhaustive:.2} s, 1000 random words"))
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut checked = 0u64;
    let mut worst: f64 = 0.0;
    for len in 1..=32usize {
        for _ in 0..50 {
            let u: Vec<Sym> = (0..len).map(|_| rng.gen_range(0..2)).collect();
            // One pass over u^1024; the phrase count of u^n is read at each copy boundary.
            let mut st = LzStream::new(LzDictionary::new(2), false);
            for n in 1..=1024usize {
                for &s in &u {
                    st.push(s);
                }
                let p = st.dictionary().len() + !st.at_phrase_boundary() as usize;
                let bound = (2.0 * (len as f64 + 1.0) * (n * len) as f64).sqrt();
                worst = worst.max(p as f64 / bound);
                checked += 1;
                if p as f64 > bound {
                    return Err(format!("|u| = {len}, n = {n}: {p} phrases > {bound:.2}"));
                }
            }
        }
    }
    Ok(format!("{checked} pairs (u, n), largest P/bound {worst:.3}"))
}

fn criterion_3() -> Verdict {
    let (k, v) = (3, 2);
    let spec = WitnessSpec::T6 { sigma: 2, k, v };
    let w = generate(&spec, 0, 400_000).map_err(|e| e.to_string())?;
    let starts = w.positions_of("zone_start");
    let ends = w.positions_of("zone_end");
    let mut dict = LzDictionary::new(2);
    let mut done = 0;
    for (zone, (&s, &e)) in starts.iter().zip(&ends).enumerate() {
        let n = zone + 1;
        if n > 8 {
            break;
        }
        let parse = parse_into(&w.symbols[s as usize..e as usize], &mut dict);
        if n < k {
            continue;
        }
        if parse.partial_final {
            return Err(format!("zone {n} ends inside a phrase"));
        }
        let mut got: HashMap<Vec<Sym>, usize> = HashMap::new();
        for p in &parse.phrases {
            let mut word = dict.expand(p.back);
            word.extend(p.ext);
            *got.entry(word).or_default() += 1;
        }
        let class = t6_enumerate(n, k, v, 2).map_err(|e| e.to_string())?;
        let f = t6_flag(n, k, v);
        let mut want: HashMap<Vec<Sym>, usize> = HashMap::new();
        for t in &class.t {
            *want.entry(t.clone()).or_default() += 1;
        }
        for i in 0..=v {
            *want.entry(vec![1; f + i]).or_default() += 1;
        }
        if got != want {
            let extra = got.keys().filter(|x| !want.contains_key(*x)).count();
            let missing = want.keys().filter(|x| !got.contains_key(*x)).count();
            return Err(format!("zone {n}: {extra} unexpected and {missing} missing phrases"));
        }
        done += 1;
    }
    if done == 0 {
        return Err("no zone with n >= k inside the prefix".into());
    }
    Ok(format!("zones {k}..={} parse into T_n plus the v+1 flags", k + done - 1))
}

fn criterion_4() -> Verdict {
    let mut names = Vec::new();
    let pd = [
        ("t4", build_theorem4_pair(&ZooParams { k: 8, period: 32, ..ZooParams::default() }).map(|p| p.0)),
        ("t5", build_theorem5_visibly(&ZooParams { t: 2, v_prime: 8, ..ZooParams::default() })),
        ("t6", build_theorem6_pair(&ZooParams { k: 4, v: 8, v_prime: 8, ..ZooParams::default() }).map(|p| p.0)),
    ];
    for (name, m) in pd {
        let m = m.map_err(|e| format!("{name}: {e}"))?;
        match check_il(&m, 10, false) {
            Ok(v) if v.is_ok() => names.push(name),
            Ok(v) => return Err(format!("{name}: {v:?}")),
            Err((w, e)) => return Err(format!("{name} fails on {w:?}: {e}")),
        }
    }
    match check_il_online(|| EnumPrefix::new(2), 2, 10) {
        Ok(OnlineIlVerdict::Ok { .. }) => names.push("plog:enum"),
        other => return Err(format!("plog:enum: {other:?}")),
    }
    match check_il_online(|| IndexCompressor::new(4), 2, 10) {
        Ok(OnlineIlVerdict::Ok { .. }) => names.push("plog:t7"),
        other => return Err(format!("plog:t7: {other:?}")),
    }
    // Two λ-pops per symbol against a budget of one.
    let mut b = SpecBuilder::new("01", None, "0#", '#', 1);
    for x in ['0', '1'] {
        b.delta("q", Some(x), '#', "p", "00#");
        b.nu("q", x, '#', "");
        b.delta("q", Some(x), '0', "p", "000");
        b.nu("q", x, '0', "");
    }
    b.delta("p", None, '0', "p", "");
    let greedy = b.build().map_err(|e| e.to_string())?;
    match run(&greedy, &[0], false) {
        Err(PdaError::BudgetExceeded { .. }) => {}
        other => return Err(format!("over-budget machine ran: {other:?}")),
    }
    Ok(format!("{} injective up to length 10; budget enforced", names.join(", ")))
}

fn inverse_samples(name: &str, spec: &WitnessSpec, check: impl Fn(&[Sym]) -> Result<bool, PdaError>) -> Verdict {
    let w = generate(spec, 11, 150_000).map_err(|e| e.to_string())?.symbols;
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for corrupt in [false, true] {
        for i in 0..1000 {
            let n = rng.gen_range(1..=w.len());
            let mut x = w[..n].to_vec();
            if corrupt {
                let j = rng.gen_range(0..n);
                x[j] ^= 1;
            }
            if !check(&x).map_err(|e| format!("{name}: {e}"))? {
                return Err(format!("{name}: sample {i} (length {n}, corrupted: {corrupt}) is not restored"));
            }
        }
    }
    Ok(format!("{name} 1000+1000"))
}

fn criterion_5() -> Verdict {
    let (c4, d4) = build_theorem4_pair(&ZooParams { k: 8, period: 32, ..ZooParams::default() }).map_err(|e| e.to_string())?;
    let a = inverse_samples("T4", &WitnessSpec::T4 { sigma: 2, k: 8 }, |x| {
        Ok(run_inverse_pair(&c4, &d4, x)? == InverseVerdict::Ok)
    })?;
    let (c6, d6) =
        build_theorem6_pair(&ZooParams { k: 4, v: 8, v_prime: 8, ..ZooParams::default() }).map_err(|e| e.to_string())?;
    let b = inverse_samples("T6", &WitnessSpec::T6 { sigma: 2, k: 4, v: 8 }, |x| {
        Ok(run_inverse_pair(&c6, &d6, x)? == InverseVerdict::Ok)
    })?;
    Ok(format!("{a}, {b}"))
}

fn experiment(name: &str, out: &Path) -> Result<ExperimentReport, String> {
    run_experiment_file(&configs_dir().join(format!("{name}.json")), out).map_err(|e| e.to_string())
}

fn criterion_6(out: &Path) -> Verdict {
    let t = Instant::now();
    let r = experiment("sep_invpd_vs_plog", out)?;
    let secs = t.elapsed().as_secs_f64();
    let (c, lz) = (&r.estimates["invpd"], &r.estimates["lz"]);
    let detail = format!("C RHat {:.4}, LZ rhoHat {:.4}, prefix {}, {secs:.1} s", c.r_hat, lz.rho_hat, r.prefix_len);
    if c.r_hat <= 0.62 && lz.rho_hat >= 0.75 && r.prefix_len >= 1_000_000 && secs < 300.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7(out: &Path) -> Verdict {
    let r = experiment("sep_plog_vs_lz", out)?;
    let (p, lz) = (&r.estimates["plog"], &r.estimates["lz"]);
    let csv = std::fs::read_to_string(r.dir.join("plog.csv")).map_err(|e| e.to_string())?;
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (n, size): (u64, u64) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        if size != 2 * n.ilog2() as u64 + 4 || cols[2] != "bits" {
            return Err(format!("at n = {n} the output is {size} {}", cols[2]));
        }
    }
    let detail = format!("plogon RHat {:.2e}, LZ RHat {:.4}, prefix {}", p.r_hat, lz.r_hat, r.prefix_len);
    if p.r_hat <= 1e-4 && lz.r_hat >= 0.8 && r.prefix_len == 1_000_000 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8(out: &Path) -> Verdict {
    let r = experiment("sep_pd_vs_lz", out)?;
    let e = &r.estimates["pd"];
    let target = 0.5 + 1.0 / 16.0 + 3.0 / 32.0 + 0.1;
    let argmax_ok = r.outcomes.iter().any(|o| o.assertion.starts_with("argmax of pd at flag_end_after_x") && o.passed);
    let detail = format!("C RHat {:.4} (band {target:.4}), peak at {}, prefix {}", e.r_hat, e.argmax_prefix, r.prefix_len);
    if e.r_hat <= target && argmax_ok && r.prefix_len >= 1_000_000 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Verdict {
    let lengths: Vec<u64> = (0..=7).map(|e| 10u64.pow(e)).chain([3_000_000, 7_000_000]).collect();
    let w = generate(&WitnessSpec::Enum { sigma: 2 }, 0, 10_000_000).map_err(|e| e.to_string())?.symbols;
    let v = check_memory_bound(
        || EnumPrefix::new(2),
        &lengths,
        MemoryBound { a: 64.0, c_exp: 2.0 },
        |n| w[..n as usize].to_vec(),
    )
    .map_err(|e| e.to_string())?;
    let MemoryVerdict::Ok { worst_fraction: a } = v else { return Err(format!("enum: {v:?}")) };

    let spec = WitnessSpec::T7 { first_zone: 4, last_zone: 12 };
    let t7 = generate(&spec, 9, 1_000_000).map_err(|e| e.to_string())?;
    let mut lengths = t7.positions_of("zone_end");
    lengths.extend(t7.positions_of("fresh_end"));
    lengths.sort_unstable();
    let v = check_memory_bound(
        || IndexCompressor::new(4),
        &lengths,
        MemoryBound { a: 64.0, c_exp: 3.0 },
        |n| t7.symbols[..n as usize].to_vec(),
    )
    .map_err(|e| e.to_string())?;
    let MemoryVerdict::Ok { worst_fraction: b } = v else { return Err(format!("t7: {v:?}")) };
    Ok(format!("enum peak at most {:.1}% of bound up to 10^7, t7 at most {:.1}% through zone 12", a * 100.0, b * 100.0))
}

fn criterion_10() -> Verdict {
    let mut files = 0;
    let mut names: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for cfg in &names {
        let ra = run_experiment_file(cfg, a.path()).map_err(|e| format!("{}: {e}", cfg.display()))?;
        let rb = run_experiment_file(cfg, b.path()).map_err(|e| format!("{}: {e}", cfg.display()))?;
        for entry in std::fs::read_dir(&ra.dir).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().is_some_and(|x| x == "csv") {
                let x = std::fs::read(&p).unwrap();
                let y = std::fs::read(rb.dir.join(p.file_name().unwrap())).map_err(|e| e.to_string())?;
                if x != y {
                    return Err(format!("{} differs between runs", p.display()));
                }
                files += 1;
            }
        }
    }
    Ok(format!("{} configs, {files} CSV files identical across two runs", names.len()))
}

fn main() {
    let out = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("LZ78 round trip", Box::new(criterion_1)),
        ("LZ phrase bound on u^n", Box::new(criterion_2)),
        ("T6 zone parse structure", Box::new(criterion_3)),
        ("IL and λ budget", Box::new(criterion_4)),
        ("T4 and T6 inverses", Box::new(criterion_5)),
        ("T4 direction", Box::new(|| criterion_6(out.path()))),
        ("enumeration direction", Box::new(|| criterion_7(out.path()))),
        ("T6 band and argmax", Box::new(|| criterion_8(out.path()))),
        ("memory metering", Box::new(criterion_9)),
        ("reproducible CSV", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{secs:.1} s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
