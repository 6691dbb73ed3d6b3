//! Flag-separated reversal compressor and its inverse.
//!
//! `C` echoes each `y` zone while pushing it, spots the flag `1^k` on
//! `k`-aligned groups, pops the flag, then checks the reversal against the
//! stack and writes one `0` per `A` matched symbols. A mismatch at position
//! `i` of a period writes `1^i 0 x` and echoes from then on.

use super::{builder_for, check_sigma, ones, out_of_range, DecoderCore, Delayed, ZooError, ZooParams};
use crate::alphabet::Sym;
use crate::pda::TransducerSpec;

/// True when `a` divides some power of `k`, so it divides every long enough zone half.
fn divides_power_of(mut a: usize, k: usize) -> bool {
    while a > 1 {
        let g = gcd(a, k);
        if g == 1 {
            return false;
        }
        a /= g;
    }
    true
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn build_theorem4_pair(p: &ZooParams) -> Result<(TransducerSpec, Delayed<T4Decoder>), ZooError> {
    let alphabet = check_sigma(p.sigma)?;
    let (k, a) = (p.k, p.period);
    if k < 2 {
        return Err(out_of_range("k must be at least 2"));
    }
    if a == 0 || !divides_power_of(a, k) {
        return Err(out_of_range(format!("period {a} does not divide a power of k = {k}")));
    }
    let b = if p.skip_counting_prefix { 0 } else { p.counting_prefix.unwrap_or(0) as usize };
    if b > 1 << 20 {
        return Err(out_of_range("counting prefix too long to tabulate"));
    }
    let sigma = p.sigma;
    let z0 = sigma as Sym;
    let mut m = builder_for(&alphabet, None, k - 1);
    for i in 0..b {
        m.state(&format!("s{i}"));
    }
    let q0 = m.state("q0");
    let f: Vec<[u32; 2]> =
        (1..k).map(|i| [m.state(&format!("f0_{i}")), m.state(&format!("f1_{i}"))]).collect();
    let r: Vec<u32> = (1..k).map(|j| m.state(&format!("r{j}"))).collect();
    let c: Vec<u32> = (1..=a).map(|i| m.state(&format!("c{i}"))).collect();
    let e = m.state("e");
    let group = |x: Sym| f[0][(x == 1) as usize];

    for y in 0..=z0 {
        for x in 0..sigma as Sym {
            for i in 0..b {
                let q = m.state(&format!("s{i}"));
                let next = if i + 1 == b { q0 } else { m.state(&format!("s{}", i + 1)) };
                m.delta_id(q, Some(x), y, next, vec![y]);
                m.nu_id(q, x, y, vec![x]);
            }
            m.delta_id(q0, Some(x), y, group(x), vec![x, y]);
            m.nu_id(q0, x, y, vec![x]);
            for i in 1..k {
                for one in [0, 1] {
                    let q = f[i - 1][one];
                    let (next, push) = if i + 1 < k {
                        (f[i][(one == 1 && x == 1) as usize], vec![x, y])
                    } else if one == 1 && x == 1 {
                        (r[0], vec![y])
                    } else {
                        (q0, vec![x, y])
                    };
                    m.delta_id(q, Some(x), y, next, push);
                    m.nu_id(q, x, y, vec![x]);
                }
            }
            for i in 1..=a {
                let (next, push, out) = if y == z0 {
                    let mut out = if i > 1 { vec![0] } else { Vec::new() };
                    out.push(x);
                    (group(x), vec![x, z0], out)
                } else if x == y {
                    if i == a {
                        (c[0], Vec::new(), vec![0])
                    } else {
                        (c[i], Vec::new(), Vec::new())
                    }
                } else {
                    let mut out = ones(i);
                    out.push(0);
                    out.push(x);
                    (e, vec![y], out)
                };
                m.delta_id(c[i - 1], Some(x), y, next, push);
                m.nu_id(c[i - 1], x, y, out);
            }
            m.delta_id(e, Some(x), y, e, vec![y]);
            m.nu_id(e, x, y, vec![x]);
        }
        if y != z0 {
            for j in 1..k {
                let next = if j + 1 < k { r[j] } else { c[0] };
                m.delta_id(r[j - 1], None, y, next, Vec::new());
            }
        }
    }
    let spec = m.build().expect("t4 compressor is well formed");
    let mut pending = vec![0; spec.states().len()];
    for i in 1..=a {
        pending[c[i - 1] as usize] = i - 1;
    }
    let core = T4Decoder { sigma, k, period: a, counting: b, pending };
    let d = Delayed::new(core, sigma, spec.states().len());
    Ok((spec, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum T4State {
    Count(usize),
    Q0,
    Flag { one: bool, i: usize },
    Pop(usize),
    /// Holds the popped stretch of the zone, in reversal order.
    Decomp(Vec<Sym>),
    ErrFlag { u: Vec<Sym>, j: usize },
    Echo,
}

/// Decoder core for [`build_theorem4_pair`]. `pending[q]` is how many
/// matched symbols `C` holds unreported in state `q`.
#[derive(Clone, Debug)]
pub struct T4Decoder {
    sigma: usize,
    k: usize,
    period: usize,
    counting: usize,
    pending: Vec<usize>,
}

impl T4Decoder {
    fn group(&self, x: Sym, top: Sym) -> (T4State, Vec<Sym>, Vec<Sym>) {
        (T4State::Flag { one: x == 1, i: 1 }, vec![x, top], vec![x])
    }
}

impl DecoderCore for T4Decoder {
    type S = T4State;

    fn initial(&self) -> T4State {
        if self.counting > 0 {
            T4State::Count(0)
        } else {
            T4State::Q0
        }
    }

    fn budget(&self) -> usize {
        self.k - 1 + self.period
    }

    fn step(&self, q: &T4State, x: Sym, top: Sym) -> Option<(T4State, Vec<Sym>, Vec<Sym>)> {
        use T4State::*;
        Some(match q {
            Count(i) => {
                let next = if i + 1 == self.counting { Q0 } else { Count(i + 1) };
                (next, vec![top], vec![x])
            }
            Q0 => self.group(x, top),
            &Flag { one, i } => {
                if i + 1 < self.k {
                    (Flag { one: one && x == 1, i: i + 1 }, vec![x, top], vec![x])
                } else if one && x == 1 {
                    (Pop(1), vec![top], vec![x])
                } else {
                    (Q0, vec![x, top], vec![x])
                }
            }
            Pop(_) => return None,
            Decomp(u) if u.is_empty() => self.group(x, top),
            Decomp(u) => match x {
                0 => (Decomp(Vec::new()), vec![top], u.clone()),
                1 => (ErrFlag { u: u.clone(), j: 0 }, vec![top], Vec::new()),
                _ => return None,
            },
            ErrFlag { u, j } => match x {
                1 => (ErrFlag { u: u.clone(), j: j + 1 }, vec![top], vec![*u.get(*j)?]),
                0 => (Echo, vec![top], Vec::new()),
                _ => return None,
            },
            Echo => (Echo, vec![top], vec![x]),
        })
    }

    fn lambda(&self, q: &T4State, top: Sym) -> Option<T4State> {
        debug_assert!((top as usize) < self.sigma);
        match q {
            T4State::Pop(j) if j + 1 < self.k => Some(T4State::Pop(j + 1)),
            T4State::Pop(_) => Some(T4State::Decomp(Vec::new())),
            T4State::Decomp(u) if u.len() < self.period => {
                let mut u = u.clone();
                u.push(top);
                Some(T4State::Decomp(u))
            }
            _ => None,
        }
    }

    fn finish(&self, q: &T4State, c_state: usize) -> Vec<Sym> {
        match q {
            T4State::Decomp(u) => u[..self.pending[c_state].min(u.len())].to_vec(),
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    use super::*;
    use crate::alphabet::Alphabet;
    use crate::pda::{check_il, run, run_inverse_pair, InverseVerdict, Pushdown};
    use crate::witness::{block_no_flag, generate, WitnessSpec};
    use crate::zoo::tabulate;

    fn params(k: usize, period: usize) -> ZooParams {
        ZooParams { k, period, skip_counting_prefix: true, ..ZooParams::default() }
    }

    fn zone(y: &[Sym], k: usize) -> Vec<Sym> {
        let mut w = y.to_vec();
        w.extend(ones(k));
        w.extend(y.iter().rev());
        w
    }

    #[test]
    fn one_zone_output() {
        let (c, _) = build_theorem4_pair(&params(4, 4)).unwrap();
        assert!(c.validate().is_empty());
        let y = block_no_flag(16, 4, 2, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        let r = run(&c, &zone(&y, 4), false).unwrap();
        let mut want = y.clone();
        want.extend(ones(4));
        want.extend([0; 4]);
        assert_eq!(r.output, want);
        assert_eq!(r.output.len(), 24);
    }

    #[test]
    fn mismatch_writes_position_flag() {
        let (c, _) = build_theorem4_pair(&params(4, 4)).unwrap();
        let y = block_no_flag(16, 4, 2, &mut ChaCha20Rng::seed_from_u64(2)).unwrap();
        for p in 0..16 {
            let mut w = zone(&y, 4);
            w[20 + p] ^= 1;
            let out = run(&c, &w, false).unwrap().output;
            let mut want = y.clone();
            want.extend(ones(4));
            want.extend(vec![0; p / 4]);
            want.extend(ones(p % 4 + 1));
            want.push(0);
            want.extend(&w[20 + p..]);
            assert_eq!(out, want, "p = {p}");
        }
    }

    #[test]
    fn compressor_is_lossless() {
        for (k, a) in [(2, 2), (2, 4), (3, 3), (4, 4), (4, 8), (4, 2)] {
            let (c, _) = build_theorem4_pair(&params(k, a)).unwrap();
            assert!(check_il(&c, 10, false).unwrap().is_ok(), "k={k} A={a}");
        }
        let p = ZooParams { counting_prefix: Some(3), ..params(2, 2) };
        let (c, _) = build_theorem4_pair(&p).unwrap();
        assert!(check_il(&c, 10, false).unwrap().is_ok());
    }

    #[test]
    fn decoder_inverts_witness_and_corruptions() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for (k, a) in [(2, 2), (3, 9), (4, 4), (8, 8)] {
            let (c, d) = build_theorem4_pair(&params(k, a)).unwrap();
            let w = generate(&WitnessSpec::T4 { sigma: 2, k }, 11, 3000).unwrap().symbols;
            for _ in 0..40 {
                let n = rng.gen_range(0..w.len());
                let mut x = w[..n].to_vec();
                assert_eq!(run_inverse_pair(&c, &d, &x).unwrap(), InverseVerdict::Ok, "k={k} n={n}");
                if n > 0 {
                    let i = rng.gen_range(0..n);
                    x[i] ^= 1;
                    assert_eq!(run_inverse_pair(&c, &d, &x).unwrap(), InverseVerdict::Ok, "k={k} n={n} flip {i}");
                }
            }
        }
    }

    #[test]
    fn decoder_inverts_every_short_word() {
        for (k, a) in [(2, 2), (4, 2), (4, 8)] {
            let (c, d) = build_theorem4_pair(&params(k, a)).unwrap();
            crate::alphabet::for_each_word(2, 12, |w| {
                assert_eq!(run_inverse_pair(&c, &d, w).unwrap(), InverseVerdict::Ok, "k={k} A={a} {w:?}");
            });
        }
    }

    #[test]
    fn tabulated_decoder_agrees() {
        let (c, d) = build_theorem4_pair(&params(2, 2)).unwrap();
        let t = tabulate(&d, &Alphabet::binary(), Some('$'), 100_000).unwrap();
        assert!(t.validate().is_empty());
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let n = rng.gen_range(0..60);
            let w: Vec<Sym> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let mut coded = run(&c, &w, false).unwrap().output;
            let idx = c.state_index(&run(&c, &w, false).unwrap().final_state).unwrap();
            coded.extend(crate::pda::state_trailer(idx, c.states().len(), 2));
            let a = run(&d, &coded, true).unwrap().output;
            let b = run(&t, &coded, true).unwrap().output;
            assert_eq!(a, b);
            assert_eq!(a, w);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(build_theorem4_pair(&params(4, 6)).is_err());
        assert!(build_theorem4_pair(&params(8, 32)).is_ok());
        assert!(build_theorem4_pair(&params(1, 1)).is_err());
    }
}
