use proptest::collection::vec;
use proptest::prelude::*;

use pdlab::alphabet::Sym;
use pdlab::harness::{estimate_limits, Point, RatioSeries, Unit};
use pdlab::lz78::{decode, encode, output_len_bits, parse_into, LzDictionary, LzStream};
use pdlab::pda::{run, run_traced, state_trailer, Pushdown, Rule};
use pdlab::witness::check::{check_t1, check_t2, check_t4, check_t5, check_t6, check_t7};
use pdlab::witness::{generate, WitnessSpec};
use pdlab::zoo::{build_theorem4_pair, build_theorem5_visibly, build_theorem6_pair, ZooParams};

fn word(max_sigma: usize, max_len: usize) -> impl Strategy<Value = (usize, Vec<Sym>)> {
    (2..=max_sigma).prop_flat_map(move |s| (Just(s), vec(0..s as Sym, 0..max_len)))
}

fn family() -> impl Strategy<Value = WitnessSpec> {
    prop_oneof![
        (2..=4usize).prop_map(|sigma| WitnessSpec::T1 { sigma }),
        (1..=4u32).prop_map(|c| WitnessSpec::T2 { sigma: 2, c }),
        (2..=6usize).prop_map(|k| WitnessSpec::T4 { sigma: 2, k }),
        (1..=3usize).prop_map(|t| WitnessSpec::T5 { t, base: 4 }),
        (3..=4usize, 1..=3usize).prop_map(|(k, v)| WitnessSpec::T6 { sigma: 2, k, v }),
        (2..=5usize).prop_map(|sigma| WitnessSpec::Enum { sigma }),
        Just(WitnessSpec::T7 { first_zone: 3, last_zone: 10 }),
    ]
}

/// Every λ-rule is silent and pops, gaps stay within the budget, and z0
/// never leaves the bottom of the stack.
fn engine_invariants<P: Pushdown>(m: &P, input: &[Sym], endmarked: bool) -> Result<(), TestCaseError> {
    let r = run_traced(m, input, endmarked).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let trace = r.trace.unwrap();
    let mut gap = 0;
    for (i, ev) in trace.iter().enumerate() {
        prop_assert_eq!(ev.before.stack.first().copied(), Some(m.bottom()));
        prop_assert!(ev.before.stack[1..].iter().all(|&s| s != m.bottom()));
        match ev.rule {
            Rule::Lambda => {
                gap += 1;
                prop_assert!(ev.emitted.is_empty());
                prop_assert!(gap <= m.budget());
                let after = trace.get(i + 1).map(|e| e.before.stack.len());
                if let Some(len) = after {
                    prop_assert_eq!(len + 1, ev.before.stack.len());
                }
            }
            Rule::Symbol(_) => gap = 0,
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lz_round_trips((sigma, x) in word(16, 3000)) {
        let e = encode(&x, &LzDictionary::new(sigma));
        prop_assert_eq!(decode(&e.bits, sigma, &LzDictionary::new(sigma)).unwrap(), x);
    }

    #[test]
    fn lz_stream_counts_prefix_outputs((sigma, x) in word(8, 800)) {
        let mut st = LzStream::new(LzDictionary::new(sigma), false);
        for (i, &s) in x.iter().enumerate() {
            st.push(s);
            if i % 37 == 0 {
                prop_assert_eq!(st.bits_so_far(), output_len_bits(&x[..=i], sigma));
            }
        }
    }

    #[test]
    fn lz_phrases_are_distinct((sigma, x) in word(4, 2000)) {
        let mut d = LzDictionary::new(sigma);
        let p = parse_into(&x, &mut d);
        let complete = p.len() - p.partial_final as usize;
        let mut seen = std::collections::HashSet::new();
        for ph in &p.phrases[..complete] {
            let mut w = d.expand(ph.back);
            w.extend(ph.ext);
            prop_assert!(seen.insert(w));
        }
    }

    #[test]
    fn witnesses_are_deterministic_and_nested(spec in family(), seed in 0..1000u64, a in 0..4000u64, b in 0..4000u64) {
        let (short, long) = (a.min(b), a.max(b));
        let x = generate(&spec, seed, long).unwrap();
        let y = generate(&spec, seed, long).unwrap();
        prop_assert_eq!(&x, &y);
        let s = generate(&spec, seed, short).unwrap();
        prop_assert_eq!(&s.symbols[..], &x.symbols[..s.symbols.len()]);
        let end = s.symbols.len() as u64;
        let inner = |w: &pdlab::witness::Witness| w.checkpoints.iter().filter(|c| c.position < end).cloned().collect::<Vec<_>>();
        prop_assert_eq!(inner(&s), inner(&x));
        let positions: Vec<u64> = x.checkpoints.iter().map(|c| c.position).collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn witnesses_pass_their_checkers(spec in family(), seed in 0..100u64) {
        let w = generate(&spec, seed, 30_000).unwrap().symbols;
        let v = match spec {
            WitnessSpec::T1 { sigma } => check_t1(&w, sigma),
            WitnessSpec::T2 { c, .. } => check_t2(&w, c),
            WitnessSpec::T4 { k, .. } => check_t4(&w, k),
            WitnessSpec::T5 { t, base } if t >= 1 => check_t5(&w, t, base),
            WitnessSpec::T6 { sigma, k, v } => check_t6(&w, sigma, k, v),
            WitnessSpec::T7 { first_zone, .. } => check_t7(&w, first_zone as usize),
            _ => Ok(0),
        };
        prop_assert!(v.is_ok(), "{:?}", v);
    }

    #[test]
    fn compressors_keep_engine_invariants(x in vec(0..2 as Sym, 0..400), k in 2..=4usize) {
        let (c, d) = build_theorem4_pair(&ZooParams { k, period: k * k, ..ZooParams::default() }).unwrap();
        engine_invariants(&c, &x, false)?;
        let r = run(&c, &x, false).unwrap();
        let mut coded = r.output;
        coded.extend(state_trailer(c.state_index(&r.final_state).unwrap(), c.state_count().unwrap(), 2));
        engine_invariants(&d, &coded, true)?;

        let (c, d) = build_theorem6_pair(&ZooParams { k: k + 1, v: 2, v_prime: 3, ..ZooParams::default() }).unwrap();
        engine_invariants(&c, &x, false)?;
        let r = run(&c, &x, false).unwrap();
        let mut coded = r.output;
        coded.extend(state_trailer(c.state_index(&r.final_state).unwrap(), c.state_count().unwrap(), 2));
        engine_invariants(&d, &coded, true)?;
    }

    #[test]
    fn visibly_machine_keeps_engine_invariants(x in vec(0..4 as Sym, 0..400)) {
        let m = build_theorem5_visibly(&ZooParams { t: 2, v_prime: 3, ..ZooParams::default() }).unwrap();
        engine_invariants(&m, &x, false)?;
    }

    #[test]
    fn runs_are_deterministic(x in vec(0..2 as Sym, 0..500)) {
        let (c, _) = build_theorem4_pair(&ZooParams { k: 3, period: 9, ..ZooParams::default() }).unwrap();
        prop_assert_eq!(run(&c, &x, false).unwrap().output, run(&c, &x, false).unwrap().output);
    }

    #[test]
    fn estimates_are_ordered(r in vec(0.0..2.0f64, 1..60), tail in 0.01..=1.0f64) {
        let points = r.iter().enumerate().map(|(i, &ratio)| Point { prefix_len: i as u64 + 1, output_size: 0, ratio }).collect();
        let s = RatioSeries { unit: Unit::Symbols, unit_note: String::new(), points };
        let e = estimate_limits(&s, tail).unwrap();
        let max = r.iter().cloned().fold(0.0, f64::max);
        prop_assert!(e.rho_hat <= e.r_hat);
        prop_assert!(e.rho_hat >= 0.0 && e.r_hat <= max);
        prop_assert!(e.r_hat >= *r.last().unwrap());
    }
}

/// A zone `R_i^{i^c}` adds at most `√(2(i+1)|w|)` phrases to the dictionary,
/// whatever the dictionary already holds. Each phrase costs a pointer into
/// the dictionary plus one symbol.
#[test]
fn t2_zone_continuation_bound() {
    for (c, last) in [(7u32, 6u64), (3, 24)] {
        let spec = WitnessSpec::T2 { sigma: 2, c };
        let len: u64 = (1..=last).map(|i| i.pow(c + 1)).sum();
        let w = generate(&spec, 3, len).unwrap();
        let starts = w.positions_of("zone_start");
        let ends = w.positions_of("zone_end");
        let mut st = LzStream::new(LzDictionary::new(2), false);
        let mut pos = 0usize;
        for i in 1..=last {
            let (s, e) = (starts[(i - 1) as usize] as usize, ends[(i - 1) as usize] as usize);
            while pos < s {
                st.push(w.symbols[pos]);
                pos += 1;
            }
            let (d, before) = (st.dictionary().len(), st.bits_so_far());
            while pos < e {
                st.push(w.symbols[pos]);
                pos += 1;
            }
            let p = (st.dictionary().len() - d) as f64;
            let p_max = (2.0 * (i + 1) as f64 * (e - s) as f64).sqrt() + 1.0;
            assert!(p <= p_max, "c={c} i={i}: {p} phrases > {p_max:.1}");
            let bits = (st.bits_so_far() - before) as f64;
            let bound = p_max * ((d as f64 + p_max).log2().ceil() + 1.0);
            assert!(bits <= bound, "c={c} i={i}: {bits} bits > {bound:.1}");
        }
    }
}
